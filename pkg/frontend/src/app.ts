/**
 * The arena page: consent gate, prompt entry, two blind players, gated
 * four-way voting, post-vote reveal with download link, feedback, and a
 * sortable leaderboard table. Plain DOM, no framework.
 *
 * Blindness rule enforced here: until the reveal payload arrives, nothing
 * rendered names a system, a provider, or a track duration. The only
 * numbers shown pre-vote are the user's own listened seconds.
 */

import {
  ApiClient,
  ApiError,
  type BlindBattle,
  type LeaderboardRow,
  type PreferenceChoice,
  type Reveal,
  type Side,
} from "./api.js";
import { BlindPlayer, htmlAudioHandle, type AudioHandle } from "./player.js";
import { SideTelemetry, defaultScheduler, type Clock, type Scheduler } from "./telemetry.js";

export interface ArenaOptions {
  clock?: Clock;
  scheduler?: Scheduler;
  audioFactory?: (url: string) => AudioHandle;
  updateIntervalMs?: number;
}

const PREFERENCES: { value: PreferenceChoice; label: string }[] = [
  { value: "A", label: "A is better" },
  { value: "B", label: "B is better" },
  { value: "TIE", label: "Tie" },
  { value: "BOTH_BAD", label: "Both are bad" },
];

function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document,
  tag: K,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, value);
  if (text !== undefined) node.textContent = text;
  return node;
}

export class ArenaApp {
  private doc: Document;
  private clock: Clock;
  private scheduler: Scheduler;
  private audioFactory: (url: string) => AudioHandle;
  private updateIntervalMs: number;

  private sessionUuid: string | null = null;
  private battle: BlindBattle | null = null;
  private players: Partial<Record<Side, BlindPlayer>> = {};
  private updateTimer: number | null = null;
  private gateConfirmed = false;
  private gateCheckInFlight = false;
  private voted = false;

  constructor(
    private root: HTMLElement,
    private api: ApiClient,
    options: ArenaOptions = {},
  ) {
    this.doc = root.ownerDocument;
    this.clock = options.clock ?? (() => Date.now() / 1000);
    this.scheduler = options.scheduler ?? defaultScheduler;
    this.audioFactory =
      options.audioFactory ?? ((url) => htmlAudioHandle(this.api.absolute(url), this.doc));
    this.updateIntervalMs = options.updateIntervalMs ?? 1000;
  }

  async start(): Promise<void> {
    await this.showConsent();
  }

  // -- consent gate ----------------------------------------------------------

  private async showConsent(): Promise<void> {
    const consent = await this.api.consent();
    this.root.replaceChildren();
    const panel = el(this.doc, "section", { class: "consent" });
    panel.append(el(this.doc, "pre", { class: "consent-text" }, consent.text));
    const accept = el(this.doc, "button", { class: "consent-accept" }, "I consent");
    const decline = el(this.doc, "button", { class: "consent-decline" }, "Decline");
    accept.addEventListener("click", () => void this.acceptConsent(consent.digest));
    decline.addEventListener("click", () => this.renderBlocked());
    panel.append(accept, decline);
    this.root.append(panel);
  }

  private async acceptConsent(digest: string): Promise<void> {
    try {
      const session = await this.api.createSession(digest);
      this.sessionUuid = session.session_uuid;
      this.renderPromptView();
    } catch (error) {
      if (error instanceof ApiError && error.code === "consent_required") {
        await this.showConsent(); // text changed on the server: re-consent
        return;
      }
      throw error;
    }
  }

  private renderBlocked(): void {
    this.root.replaceChildren(
      el(this.doc, "p", { class: "blocked" }, "The arena requires consent to participate."),
    );
  }

  // -- prompt entry ----------------------------------------------------------

  private renderPromptView(message = ""): void {
    this.stopUpdates();
    this.root.replaceChildren();
    const form = el(this.doc, "form", { class: "prompt-form" });
    const input = el(this.doc, "input", {
      class: "prompt-input",
      type: "text",
      placeholder: "Describe the music you want to hear",
      maxlength: "2000",
    });
    const submit = el(this.doc, "button", { class: "prompt-submit", type: "submit" }, "Battle");
    const status = el(this.doc, "p", { class: "status" }, message);
    form.append(input, submit);
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.startBattle(input.value);
    });
    const board = el(this.doc, "button", { class: "show-leaderboard" }, "Leaderboard");
    board.addEventListener("click", () => void this.renderLeaderboard());
    this.root.append(form, status, board);
  }

  private setStatus(text: string): void {
    const status = this.root.querySelector(".status");
    if (status) status.textContent = text;
  }

  private async startBattle(prompt: string): Promise<void> {
    if (!this.sessionUuid) return;
    this.setStatus("Generating two tracks, hang tight ...");
    try {
      this.battle = await this.api.createBattle(this.sessionUuid, prompt);
    } catch (error) {
      if (error instanceof ApiError) {
        const hint =
          error.code === "moderation_rejected"
            ? `Prompt rejected (${String(error.body.category ?? "policy")}): ${error.message}`
            : error.message;
        this.setStatus(hint);
        return;
      }
      throw error;
    }
    this.renderBattleView();
  }

  // -- the blind battle ------------------------------------------------------

  private renderBattleView(): void {
    const battle = this.battle;
    if (!battle) return;
    this.voted = false;
    this.gateConfirmed = false;
    this.root.replaceChildren();
    const arena = el(this.doc, "section", { class: "battle" });
    for (const side of ["A", "B"] as Side[]) {
      arena.append(this.buildPlayerCard(side, battle));
    }
    const voteBar = el(this.doc, "div", { class: "vote-bar" });
    for (const { value, label } of PREFERENCES) {
      const button = el(this.doc, "button", { class: "vote", "data-pref": value }, label);
      button.disabled = true;
      button.addEventListener("click", () => void this.castVote(value));
      voteBar.append(button);
    }
    const hint = el(
      this.doc,
      "p",
      { class: "gate-hint" },
      "Listen to both tracks to unlock voting.",
    );
    arena.append(voteBar, hint);
    this.root.append(arena);
    this.startUpdates();
  }

  private buildPlayerCard(side: Side, battle: BlindBattle): HTMLElement {
    const url = side === "A" ? battle.a_audio_url : battle.b_audio_url;
    const telemetry = new SideTelemetry(
      side,
      this.clock,
      (s, events) => this.api.submitListenEvents(battle.battle_uuid, s, events),
      this.scheduler,
    );
    const player = new BlindPlayer(side, this.audioFactory(url), telemetry, (playingSide) => {
      const other = playingSide === "A" ? "B" : "A";
      this.players[other]?.pause();
    });
    this.players[side] = player;

    const card = el(this.doc, "div", { class: "player", "data-side": side });
    card.append(el(this.doc, "h2", {}, `Track ${side}`));
    const toggle = el(this.doc, "button", { class: "play-toggle", "data-side": side }, "Play");
    toggle.addEventListener("click", () => {
      void player.toggle().then(() => {
        toggle.textContent = player.playing ? "Pause" : "Play";
      });
    });
    const volume = el(this.doc, "input", {
      class: "volume",
      type: "range",
      min: "0",
      max: "100",
      value: "100",
    });
    volume.addEventListener("input", () => player.setVolume(Number(volume.value) / 100));
    const listened = el(
      this.doc,
      "span",
      { class: "listened", "data-side": side },
      "listened 0.0s",
    );
    card.append(toggle, volume, listened);
    return card;
  }

  private startUpdates(): void {
    this.updateTimer = this.scheduler.setInterval(
      () => void this.refreshGate(),
      this.updateIntervalMs,
    );
  }

  private stopUpdates(): void {
    if (this.updateTimer !== null) this.scheduler.clearInterval(this.updateTimer);
    this.updateTimer = null;
  }

  /** Update listened displays; ask the service to confirm the gate. */
  private async refreshGate(): Promise<void> {
    const battle = this.battle;
    if (!battle || this.voted) return;
    let minListened = Infinity;
    for (const side of ["A", "B"] as Side[]) {
      const player = this.players[side];
      if (!player) continue;
      const seconds = player.listenedSeconds();
      minListened = Math.min(minListened, seconds);
      const label = this.root.querySelector(`.listened[data-side="${side}"]`);
      if (label) label.textContent = `listened ${seconds.toFixed(1)}s`;
    }
    if (this.gateConfirmed || this.gateCheckInFlight) return;
    this.gateCheckInFlight = true;
    try {
      // flush buffered ticks so the service sees what the display shows
      await Promise.all([
        this.players.A?.telemetry.flush(),
        this.players.B?.telemetry.flush(),
      ]);
      const status = await this.api.gateStatus(battle.battle_uuid);
      const hint = this.root.querySelector(".gate-hint");
      if (status.open) {
        this.gateConfirmed = true;
        for (const button of this.root.querySelectorAll<HTMLButtonElement>("button.vote")) {
          button.disabled = false;
        }
        if (hint) hint.textContent = "Vote when ready.";
      } else if (hint) {
        const needA = Math.max(0, status.required_seconds - status.a_listened_seconds);
        const needB = Math.max(0, status.required_seconds - status.b_listened_seconds);
        hint.textContent = `Keep listening: ${needA.toFixed(1)}s more on A, ${needB.toFixed(1)}s more on B.`;
      }
    } finally {
      this.gateCheckInFlight = false;
    }
  }

  private async castVote(preference: PreferenceChoice): Promise<void> {
    const battle = this.battle;
    if (!battle || !this.sessionUuid || this.voted) return;
    // final flush: the vote must not race buffered telemetry
    await Promise.all([
      this.players.A?.telemetry.finalize(),
      this.players.B?.telemetry.finalize(),
    ]);
    try {
      const reveal = await this.api.vote(battle.battle_uuid, this.sessionUuid, preference);
      this.voted = true;
      this.stopUpdates();
      this.renderReveal(reveal);
    } catch (error) {
      if (error instanceof ApiError && error.code === "gate_not_met") {
        const hint = this.root.querySelector(".gate-hint");
        if (hint) hint.textContent = error.message;
        return;
      }
      throw error;
    }
  }

  // -- reveal and feedback -----------------------------------------------------

  private renderReveal(reveal: Reveal): void {
    this.root.replaceChildren();
    const panel = el(this.doc, "section", { class: "reveal" });
    panel.append(el(this.doc, "h2", {}, `You voted: ${reveal.preference}`));
    for (const side of ["a", "b"] as const) {
      const info = reveal[side];
      panel.append(
        el(
          this.doc,
          "p",
          { class: `identity identity-${side}` },
          `${side.toUpperCase()}: ${info.display_name} ` +
            `(${info.system.system_tag}:${info.system.variant_tag}) generated ` +
            `${info.duration_seconds.toFixed(1)}s of audio in ` +
            `${info.generation_seconds.toFixed(2)}s (RTF ${info.rtf.toFixed(1)}x)`,
        ),
      );
    }
    if (reveal.download_url) {
      panel.append(
        el(
          this.doc,
          "a",
          { class: "download-link", href: this.api.absolute(reveal.download_url) },
          "Download your preferred track",
        ),
      );
    }
    panel.append(this.buildFeedbackForm(reveal.battle_uuid));
    const again = el(this.doc, "button", { class: "new-battle" }, "New battle");
    again.addEventListener("click", () => this.renderPromptView());
    panel.append(again);
    this.root.append(panel);
  }

  private buildFeedbackForm(battleUuid: string): HTMLElement {
    const form = el(this.doc, "form", { class: "feedback-form" });
    const overall = el(this.doc, "textarea", {
      class: "feedback-overall",
      placeholder: "Why did you vote this way?",
    });
    const forA = el(this.doc, "textarea", {
      class: "feedback-a",
      placeholder: "Notes on track A",
    });
    const forB = el(this.doc, "textarea", {
      class: "feedback-b",
      placeholder: "Notes on track B",
    });
    const submit = el(this.doc, "button", { type: "submit" }, "Send feedback");
    form.append(overall, forA, forB, submit);
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.api
        .feedback(battleUuid, {
          feedback: overall.value || undefined,
          a_feedback: forA.value || undefined,
          b_feedback: forB.value || undefined,
        })
        .then(() => form.replaceChildren(el(this.doc, "p", {}, "Thanks for the feedback!")));
    });
    return form;
  }

  // -- leaderboard ---------------------------------------------------------------

  private async renderLeaderboard(sortKey: keyof LeaderboardRow = "arena_score"): Promise<void> {
    const board = await this.api.leaderboard();
    const rows = [...board.entries].sort((x, y) => {
      const a = x[sortKey];
      const b = y[sortKey];
      if (typeof a === "number" && typeof b === "number") return b - a;
      return String(a).localeCompare(String(b));
    });
    this.root.replaceChildren();
    const table = el(this.doc, "table", { class: "leaderboard" });
    const header = el(this.doc, "tr", {});
    const columns: (keyof LeaderboardRow)[] = [
      "system",
      "arena_score",
      "ci_low",
      "ci_high",
      "votes",
      "median_rtf",
      "provider",
      "license",
    ];
    for (const column of columns) {
      const cell = el(this.doc, "th", { "data-column": column }, column);
      cell.addEventListener("click", () => void this.renderLeaderboard(column));
      header.append(cell);
    }
    table.append(header);
    for (const row of rows) {
      const tr = el(this.doc, "tr", { class: "entry" });
      for (const column of columns) {
        const value = row[column];
        tr.append(
          el(
            this.doc,
            "td",
            {},
            typeof value === "number" ? value.toFixed(1) : String(value),
          ),
        );
      }
      table.append(tr);
    }
    const back = el(this.doc, "button", { class: "back" }, "Back");
    back.addEventListener("click", () => this.renderPromptView());
    this.root.append(table, back);
  }
}

export function mountArena(root: HTMLElement, baseUrl: string, options?: ArenaOptions): ArenaApp {
  const app = new ArenaApp(root, new ApiClient(baseUrl), options);
  void app.start();
  return app;
}
