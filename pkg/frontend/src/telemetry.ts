/**
 * Playback telemetry for one side of a battle.
 *
 * Every user play/pause interaction produces exactly one PLAY or PAUSE
 * event; a once-per-second TICK heartbeat runs while playing. PLAY and
 * PAUSE flush immediately, TICKs flush on a five-second cadence, and the
 * vote path awaits a final flush so no listening is lost.
 */

import type { ListenEvent, Side } from "./api.js";
import { effectiveListenSeconds } from "./listen.js";

export type Clock = () => number; // epoch seconds
export type Scheduler = {
  setInterval(fn: () => void, ms: number): number;
  clearInterval(id: number): void;
};

export const defaultScheduler: Scheduler = {
  setInterval: (fn, ms) => setInterval(fn, ms) as unknown as number,
  clearInterval: (id) => clearInterval(id),
};

export const TICK_INTERVAL_MS = 1000;
export const FLUSH_INTERVAL_MS = 5000;

export class SideTelemetry {
  private pending: ListenEvent[] = [];
  private history: ListenEvent[] = [];
  private playing = false;
  private tickTimer: number | null = null;
  private flushTimer: number | null = null;
  private chain: Promise<void> = Promise.resolve();

  constructor(
    readonly side: Side,
    private clock: Clock,
    private send: (side: Side, events: ListenEvent[]) => Promise<unknown>,
    private scheduler: Scheduler = defaultScheduler,
  ) {}

  get isPlaying(): boolean {
    return this.playing;
  }

  /** Listened seconds as displayed to the user, from the local event log. */
  listenedSeconds(): number {
    return effectiveListenSeconds(this.history, this.clock());
  }

  recordPlay(): void {
    if (this.playing) return;
    this.playing = true;
    this.push("PLAY");
    this.tickTimer = this.scheduler.setInterval(() => this.push("TICK"), TICK_INTERVAL_MS);
    this.flushTimer = this.scheduler.setInterval(() => void this.flush(), FLUSH_INTERVAL_MS);
    void this.flush();
  }

  recordPause(): void {
    if (!this.playing) return;
    this.playing = false;
    if (this.tickTimer !== null) this.scheduler.clearInterval(this.tickTimer);
    if (this.flushTimer !== null) this.scheduler.clearInterval(this.flushTimer);
    this.tickTimer = this.flushTimer = null;
    this.push("PAUSE");
    void this.flush();
  }

  private push(kind: ListenEvent[0]): void {
    const event: ListenEvent = [kind, this.clock()];
    this.pending.push(event);
    this.history.push(event);
  }

  /** Send whatever is buffered; batches stay ordered per side. */
  flush(): Promise<void> {
    if (this.pending.length === 0) return this.chain;
    const batch = this.pending;
    this.pending = [];
    this.chain = this.chain.then(() =>
      this.send(this.side, batch).then(
        () => undefined,
        () => {
          // refused batches are dropped; the server log stays authoritative
        },
      ),
    );
    return this.chain;
  }

  /** Pause if needed and deliver everything; called before voting. */
  async finalize(): Promise<void> {
    this.recordPause();
    await this.flush();
  }
}
