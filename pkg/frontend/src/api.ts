/**
 * Typed client for the arena service API. All traffic goes through here;
 * the app never talks to any other host.
 */

export type Side = "A" | "B";
export type PreferenceChoice = "A" | "B" | "TIE" | "BOTH_BAD";
export type ListenEventKind = "PLAY" | "PAUSE" | "TICK";
export type ListenEvent = [ListenEventKind, number];

export interface ConsentDoc {
  text: string;
  digest: string;
}

export interface SessionInfo {
  session_uuid: string;
  create_time: number;
  ack_tos: string;
}

export interface BlindBattle {
  battle_uuid: string;
  a_audio_url: string;
  b_audio_url: string;
}

export interface GateStatus {
  battle_uuid: string;
  open: boolean;
  required_seconds: number;
  a_listened_seconds: number;
  b_listened_seconds: number;
}

export interface RevealSide {
  system: { system_tag: string; variant_tag: string };
  display_name: string;
  generation_seconds: number;
  rtf: number;
  duration_seconds: number;
  retries: number;
}

export interface Reveal {
  battle_uuid: string;
  preference: PreferenceChoice;
  a: RevealSide;
  b: RevealSide;
  download_url: string | null;
}

export interface LeaderboardRow {
  system: string;
  arena_score: number;
  ci_low: number;
  ci_high: number;
  votes: number;
  median_rtf: number;
  provider: string;
  license: string;
  training_data_info: string;
  both_bad_rate: number;
}

export interface Leaderboard {
  entries: LeaderboardRow[];
  scatter: Record<string, unknown>[];
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
    public body: Record<string, unknown>,
  ) {
    super(message);
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private baseUrl: string,
    private fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {
    this.baseUrl = baseUrl.replace(/\/$/, "");
  }

  absolute(path: string): string {
    return `${this.baseUrl}${path}`;
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.fetchFn(this.absolute(path), {
      method,
      headers: body === undefined ? {} : { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const text = await response.text();
    const parsed = text ? JSON.parse(text) : {};
    if (!response.ok) {
      throw new ApiError(
        response.status,
        String(parsed.code ?? "error"),
        String(parsed.message ?? response.statusText),
        parsed,
      );
    }
    return parsed as T;
  }

  consent(): Promise<ConsentDoc> {
    return this.request("GET", "/consent");
  }

  createSession(ackTos: string, frontendVersion = "tunearena-ui/0.1.0"): Promise<SessionInfo> {
    return this.request("POST", "/sessions", {
      ack_tos: ackTos,
      frontend_version: frontendVersion,
    });
  }

  createBattle(sessionUuid: string, prompt: string): Promise<BlindBattle> {
    return this.request("POST", "/battles", { session_uuid: sessionUuid, prompt });
  }

  submitListenEvents(battleUuid: string, side: Side, events: ListenEvent[]): Promise<unknown> {
    return this.request("POST", `/battles/${battleUuid}/listen`, { side, events });
  }

  gateStatus(battleUuid: string): Promise<GateStatus> {
    return this.request("GET", `/battles/${battleUuid}/gate`);
  }

  vote(battleUuid: string, sessionUuid: string, preference: PreferenceChoice): Promise<Reveal> {
    return this.request("POST", `/battles/${battleUuid}/vote`, {
      session_uuid: sessionUuid,
      preference,
    });
  }

  feedback(
    battleUuid: string,
    fields: { feedback?: string; a_feedback?: string; b_feedback?: string },
  ): Promise<unknown> {
    return this.request("POST", `/battles/${battleUuid}/feedback`, fields);
  }

  leaderboard(): Promise<Leaderboard> {
    return this.request("GET", "/leaderboard");
  }
}
