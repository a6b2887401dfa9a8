/**
 * Client-side mirror of the service's listened-time rule, used only for the
 * progress display. The service recomputes from the same events and its
 * answer is authoritative; these must agree to within batching latency.
 */

import type { ListenEvent } from "./api.js";

export function effectiveListenSeconds(events: ListenEvent[], now: number): number {
  let total = 0;
  let anchor: number | null = null;
  for (const [kind, time] of events) {
    if (kind === "TICK") continue;
    if (kind === "PLAY") {
      anchor = time;
    } else if (kind === "PAUSE" && anchor !== null) {
      total += Math.max(0, time - anchor);
      anchor = null;
    }
  }
  if (anchor !== null) total += Math.max(0, now - anchor);
  return total;
}
