// Pointer-gesture handling: maps canvas gestures to protocol events and
// delivers them to the rating service in order, queueing locally (with a
// visible warning) whenever the service is unreachable.

import { clampCursor } from "./cursor";
import { ServiceError } from "./client";
import type { SessionSummary } from "./client";
import type { RatingEventBody } from "./types";

/** The slice of the service client the controller depends on. */
export interface EventPoster {
  postEvent(sessionId: string, event: RatingEventBody): Promise<SessionSummary>;
}

export type Gesture =
  | { kind: "press" }
  | { kind: "drag"; x: number; y: number }
  | { kind: "release" }
  | { kind: "confirm" };

/** Where the grid circle sits on the canvas, in pixels (canvas y grows down). */
export interface CanvasViewport {
  centerX: number;
  centerY: number;
  radius: number;
}

/**
 * Translate one gesture into a protocol event body.
 *
 * Drag coordinates are normalized against the viewport to the unit disk
 * (flipping the canvas y axis so angles run counter-clockwise) and clamped
 * to the rim; presses and releases toggle the edit trigger; confirm commits
 * the current stimulus.
 */
export function gestureToEvent(
  gesture: Gesture,
  viewport: CanvasViewport,
  stimulusId: string | null,
  tMono: number,
): RatingEventBody {
  switch (gesture.kind) {
    case "press":
      return { event_type: "trigger_press", t_mono: tMono };
    case "drag": {
      const nx = (gesture.x - viewport.centerX) / viewport.radius;
      const ny = (viewport.centerY - gesture.y) / viewport.radius;
      const cursor = clampCursor(nx, ny);
      return { event_type: "move", t_mono: tMono, payload: { r: cursor.r, phi: cursor.phi } };
    }
    case "release":
      return { event_type: "trigger_release", t_mono: tMono };
    case "confirm":
      return { event_type: "confirm", t_mono: tMono, stimulus_id: stimulusId };
  }
}

/** Minimal localStorage-compatible surface for queue persistence. */
export interface QueueStorage {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
  removeItem(key: string): void;
}

export class MemoryStorage implements QueueStorage {
  private items = new Map<string, string>();

  getItem(key: string): string | null {
    return this.items.has(key) ? (this.items.get(key) as string) : null;
  }

  setItem(key: string, value: string): void {
    this.items.set(key, value);
  }

  removeItem(key: string): void {
    this.items.delete(key);
  }
}

function defaultStorage(): QueueStorage {
  const anyGlobal = globalThis as { localStorage?: QueueStorage };
  return anyGlobal.localStorage ?? new MemoryStorage();
}

function defaultClock(): () => number {
  const origin = performance.now();
  return () => performance.now() - origin;
}

export interface ControllerOptions {
  viewport: CanvasViewport;
  /** millisecond clock; readings are floored and forced non-decreasing */
  clock?: () => number;
  storage?: QueueStorage;
  /** called with a human-readable message whenever events queue up or drop */
  warn?: (message: string) => void;
}

export interface SubmitResult {
  /** false when the event is still waiting in the local queue */
  delivered: boolean;
}

/**
 * Drives one rating session: stamps gestures with a monotonic clock,
 * completes them into full event records, and posts them strictly in order
 * with at most one request in flight. Undeliverable events persist in
 * client-local storage (same record format as the service log) and flush,
 * still in order, once the service is reachable again.
 */
export class GestureController {
  readonly sessionId: string;
  private readonly subjectId: string;
  private readonly method: string;
  private readonly client: EventPoster;
  private readonly viewport: CanvasViewport;
  private readonly clock: () => number;
  private readonly storage: QueueStorage;
  private readonly warn: (message: string) => void;
  private readonly queueKey: string;
  private queue: RatingEventBody[];
  private tail: Promise<boolean> = Promise.resolve(true);
  private readonly baseT: number;
  private lastT: number;
  private _stimulusId: string | null = null;

  constructor(client: EventPoster, session: SessionSummary, options: ControllerOptions) {
    this.client = client;
    this.sessionId = session.session_id;
    this.subjectId = session.subject_id;
    this.method = session.method;
    this.viewport = options.viewport;
    this.clock = options.clock ?? defaultClock();
    this.storage = options.storage ?? defaultStorage();
    this.warn = options.warn ?? ((message) => console.warn(message));
    this.queueKey = `morphamood.queue.${this.sessionId}`;
    this.queue = this.loadQueue();
    // resume the millisecond clock above everything the service has accepted
    // and everything still waiting in the queue
    let floor = session.last_t_mono ?? 0;
    for (const event of this.queue) {
      if (event.t_mono > floor) floor = event.t_mono;
    }
    this.baseT = floor;
    this.lastT = floor;
  }

  get stimulusId(): string | null {
    return this._stimulusId;
  }

  get queuedCount(): number {
    return this.queue.length;
  }

  private loadQueue(): RatingEventBody[] {
    const text = this.storage.getItem(this.queueKey);
    if (!text) return [];
    return text
      .split("\n")
      .filter((line) => line.length > 0)
      .map((line) => JSON.parse(line) as RatingEventBody);
  }

  private persistQueue(): void {
    if (this.queue.length === 0) {
      this.storage.removeItem(this.queueKey);
    } else {
      this.storage.setItem(this.queueKey, this.queue.map((e) => JSON.stringify(e)).join("\n"));
    }
  }

  private tick(): number {
    const now = Math.floor(this.baseT + this.clock());
    this.lastT = Math.max(now, this.lastT);
    return this.lastT;
  }

  private complete(event: RatingEventBody): RatingEventBody {
    return {
      session_id: this.sessionId,
      subject_id: this.subjectId,
      method: this.method,
      stimulus_id: event.stimulus_id ?? null,
      event_type: event.event_type,
      t_mono: event.t_mono,
      t_wall: new Date().toISOString(),
      payload: event.payload ?? null,
    };
  }

  private enqueue(event: RatingEventBody): void {
    this.queue.push(this.complete(event));
    this.persistQueue();
  }

  /** Serialize delivery passes: at most one request in flight per session. */
  private pump(): Promise<boolean> {
    this.tail = this.tail.then(() => this.drain(), () => this.drain());
    return this.tail;
  }

  /**
   * Deliver queued events head-first; stops (keeping the rest queued) as
   * soon as the service is unreachable. Server-rejected events are dropped
   * with a warning: the service has already recorded or refused them, so
   * retrying the identical record cannot succeed.
   */
  private async drain(): Promise<boolean> {
    while (this.queue.length > 0) {
      const head = this.queue[0] as RatingEventBody;
      try {
        await this.client.postEvent(this.sessionId, head);
      } catch (error) {
        if (error instanceof ServiceError) {
          this.warn(
            `event ${head.event_type} rejected by the service `
            + `(${error.code}): ${error.message}`,
          );
        } else {
          this.warn(
            `rating service unreachable; ${this.queue.length} event(s) queued locally`,
          );
          return false;
        }
      }
      this.queue.shift();
      this.persistQueue();
    }
    return true;
  }

  /** Announce a stimulus and show the rating scale for it. */
  async showStimulus(stimulusId: string): Promise<SubmitResult> {
    this._stimulusId = stimulusId;
    this.enqueue({ event_type: "stimulus_start", t_mono: this.tick(), stimulus_id: stimulusId });
    this.enqueue({ event_type: "rating_shown", t_mono: this.tick(), stimulus_id: stimulusId });
    const flushed = await this.pump();
    return { delivered: flushed };
  }

  /** Map one gesture to an event and deliver (or queue) it. */
  async submit(gesture: Gesture): Promise<SubmitResult> {
    this.enqueue(gestureToEvent(gesture, this.viewport, this._stimulusId, this.tick()));
    const flushed = await this.pump();
    return { delivered: flushed };
  }

  /** Retry queued events, preserving their order. */
  async flush(): Promise<boolean> {
    return this.pump();
  }
}
