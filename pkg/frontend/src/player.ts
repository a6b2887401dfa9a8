/**
 * Blind audio players. No seek bar, no total-length indicator, no playback
 * rate control: seeking is untracked by the telemetry model and a visible
 * duration would leak what the blind test conceals. Volume is allowed.
 * Playing one side pauses the other so listen intervals are unambiguous.
 */

import type { Side } from "./api.js";
import { SideTelemetry } from "./telemetry.js";

/** The slice of an audio element the player needs; fakeable in tests. */
export interface AudioHandle {
  play(): Promise<void> | void;
  pause(): void;
  setVolume(volume: number): void;
  onEnded(handler: () => void): void;
}

export function htmlAudioHandle(url: string, doc: Document = document): AudioHandle {
  const element = doc.createElement("audio");
  element.src = url;
  element.preload = "auto";
  // no element.controls: the blind UI renders its own play/pause button only
  return {
    play: () => element.play(),
    pause: () => element.pause(),
    setVolume: (volume) => {
      element.volume = volume;
    },
    onEnded: (handler) => element.addEventListener("ended", handler),
  };
}

export class BlindPlayer {
  constructor(
    readonly side: Side,
    private audio: AudioHandle,
    readonly telemetry: SideTelemetry,
    private onExclusivePlay: (side: Side) => void,
  ) {
    this.audio.onEnded(() => this.pause());
  }

  get playing(): boolean {
    return this.telemetry.isPlaying;
  }

  async play(): Promise<void> {
    if (this.playing) return;
    this.onExclusivePlay(this.side);
    await this.audio.play();
    this.telemetry.recordPlay();
  }

  pause(): void {
    if (!this.playing) return;
    this.audio.pause();
    this.telemetry.recordPause();
  }

  async toggle(): Promise<void> {
    if (this.playing) {
      this.pause();
    } else {
      await this.play();
    }
  }

  setVolume(volume: number): void {
    this.audio.setVolume(Math.min(1, Math.max(0, volume)));
  }

  listenedSeconds(): number {
    return this.telemetry.listenedSeconds();
  }
}
