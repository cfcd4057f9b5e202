import { describe, expect, it } from "vitest";

import { ServiceError } from "../src/client";
import type { SessionSummary } from "../src/client";
import {
  GestureController,
  MemoryStorage,
  gestureToEvent,
} from "../src/events";
import type { EventPoster } from "../src/events";
import type { RatingEventBody } from "../src/types";

const VIEWPORT = { centerX: 100, centerY: 100, radius: 80 };

const SESSION: SessionSummary = {
  session_id: "s1",
  subject_id: "p1",
  method: "MAM",
  mode: "View",
  cursor: { r: 0, phi: 0 },
  stimulus_id: null,
  committed: null,
  events_logged: 0,
  protocol_errors: 0,
  finalized: false,
  last_t_mono: 0,
};

const EVENT_FIELDS = [
  "session_id",
  "subject_id",
  "method",
  "stimulus_id",
  "event_type",
  "t_mono",
  "t_wall",
  "payload",
];

class FakePoster implements EventPoster {
  received: RatingEventBody[] = [];
  unreachable = false;
  rejectNext: ServiceError | null = null;
  private concurrent = 0;
  maxConcurrent = 0;

  async postEvent(sessionId: string, event: RatingEventBody): Promise<SessionSummary> {
    this.concurrent += 1;
    this.maxConcurrent = Math.max(this.maxConcurrent, this.concurrent);
    await new Promise((resolve) => setTimeout(resolve, 0));
    try {
      if (this.unreachable) {
        throw new TypeError("fetch failed");
      }
      if (this.rejectNext) {
        const error = this.rejectNext;
        this.rejectNext = null;
        throw error;
      }
      this.received.push(event);
      return { ...SESSION, session_id: sessionId };
    } finally {
      this.concurrent -= 1;
    }
  }
}

function makeController(poster: FakePoster, overrides: {
  clock?: () => number;
  storage?: MemoryStorage;
  warn?: (message: string) => void;
} = {}) {
  let t = 0;
  return new GestureController(poster, SESSION, {
    viewport: VIEWPORT,
    clock: overrides.clock ?? (() => (t += 100)),
    storage: overrides.storage ?? new MemoryStorage(),
    warn: overrides.warn ?? (() => undefined),
  });
}

describe("gestureToEvent", () => {
  it("maps press, release, and confirm to their protocol events", () => {
    expect(gestureToEvent({ kind: "press" }, VIEWPORT, null, 5))
      .toEqual({ event_type: "trigger_press", t_mono: 5 });
    expect(gestureToEvent({ kind: "release" }, VIEWPORT, null, 6))
      .toEqual({ event_type: "trigger_release", t_mono: 6 });
    expect(gestureToEvent({ kind: "confirm" }, VIEWPORT, "c01", 7))
      .toEqual({ event_type: "confirm", t_mono: 7, stimulus_id: "c01" });
  });

  it("normalizes drag coordinates to the unit disk with y flipped upward", () => {
    const center = gestureToEvent({ kind: "drag", x: 100, y: 100 }, VIEWPORT, null, 1);
    expect(center.payload).toEqual({ r: 0, phi: 0 });

    const east = gestureToEvent({ kind: "drag", x: 180, y: 100 }, VIEWPORT, null, 2);
    expect(east.payload).toEqual({ r: 1, phi: 0 });

    const up = gestureToEvent({ kind: "drag", x: 100, y: 20 }, VIEWPORT, null, 3);
    expect(up.payload?.r).toBe(1);
    expect(up.payload?.phi).toBeCloseTo(90, 12);

    const down = gestureToEvent({ kind: "drag", x: 100, y: 140 }, VIEWPORT, null, 4);
    expect(down.payload?.r).toBeCloseTo(0.5, 12);
    expect(down.payload?.phi).toBeCloseTo(-90, 12);
  });

  it("clamps drags beyond the grid circle to the rim", () => {
    const far = gestureToEvent({ kind: "drag", x: 500, y: 100 }, VIEWPORT, null, 1);
    expect(far.payload?.r).toBe(1);
    expect(far.payload?.phi).toBe(0);
  });
});

describe("GestureController delivery", () => {
  it("posts a full rating sequence in order with complete records", async () => {
    const poster = new FakePoster();
    const controller = makeController(poster);

    await controller.showStimulus("c01");
    await controller.submit({ kind: "press" });
    await controller.submit({ kind: "drag", x: 180, y: 100 });
    await controller.submit({ kind: "release" });
    await controller.submit({ kind: "confirm" });

    expect(poster.received.map((e) => e.event_type)).toEqual([
      "stimulus_start",
      "rating_shown",
      "trigger_press",
      "move",
      "trigger_release",
      "confirm",
    ]);
    for (const event of poster.received) {
      expect(Object.keys(event).sort()).toEqual([...EVENT_FIELDS].sort());
      expect(Number.isInteger(event.t_mono)).toBe(true);
      expect(event.session_id).toBe("s1");
      expect(event.subject_id).toBe("p1");
      expect(event.method).toBe("MAM");
    }
    const times = poster.received.map((e) => e.t_mono);
    expect([...times].sort((a, b) => a - b)).toEqual(times);
    expect(poster.received[5]?.stimulus_id).toBe("c01");
    expect(poster.received[3]?.payload).toEqual({ r: 1, phi: 0 });
  });

  it("floors clock readings and never lets t_mono decrease", async () => {
    const readings = [1.7, 3.2, 3.9, 2.0, 9.01];
    let i = 0;
    const poster = new FakePoster();
    const controller = makeController(poster, { clock: () => readings[i++] ?? 50 });

    await controller.submit({ kind: "press" });
    await controller.submit({ kind: "release" });
    await controller.submit({ kind: "press" });
    await controller.submit({ kind: "release" });
    await controller.submit({ kind: "press" });

    expect(poster.received.map((e) => e.t_mono)).toEqual([1, 3, 3, 3, 9]);
  });

  it("resumes the clock above the session's recorded floor", async () => {
    const poster = new FakePoster();
    let t = 0;
    const controller = new GestureController(poster, { ...SESSION, last_t_mono: 5000 }, {
      viewport: VIEWPORT,
      clock: () => (t += 10),
      storage: new MemoryStorage(),
      warn: () => undefined,
    });
    await controller.submit({ kind: "press" });
    await controller.submit({ kind: "release" });
    expect(poster.received.map((e) => e.t_mono)).toEqual([5010, 5020]);
  });

  it("keeps at most one request in flight across rapid submissions", async () => {
    const poster = new FakePoster();
    const controller = makeController(poster);
    const results = await Promise.all([
      controller.showStimulus("c01"),
      controller.submit({ kind: "press" }),
      controller.submit({ kind: "drag", x: 120, y: 80 }),
      controller.submit({ kind: "release" }),
      controller.submit({ kind: "confirm" }),
    ]);

    expect(poster.maxConcurrent).toBe(1);
    expect(results.every((r) => r.delivered)).toBe(true);
    expect(poster.received.map((e) => e.event_type)).toEqual([
      "stimulus_start",
      "rating_shown",
      "trigger_press",
      "move",
      "trigger_release",
      "confirm",
    ]);
  });
});

describe("GestureController offline queue", () => {
  it("queues events with a visible warning while the service is unreachable", async () => {
    const poster = new FakePoster();
    poster.unreachable = true;
    const storage = new MemoryStorage();
    const warnings: string[] = [];
    const controller = makeController(poster, { storage, warn: (m) => warnings.push(m) });

    const first = await controller.submit({ kind: "press" });
    const second = await controller.submit({ kind: "drag", x: 180, y: 100 });

    expect(first.delivered).toBe(false);
    expect(second.delivered).toBe(false);
    expect(controller.queuedCount).toBe(2);
    expect(warnings.length).toBeGreaterThan(0);
    expect(warnings[0]).toContain("unreachable");
    expect(poster.received).toEqual([]);

    const stored = storage.getItem("morphamood.queue.s1");
    expect(stored).not.toBeNull();
    const records = (stored as string).split("\n").map((line) => JSON.parse(line));
    expect(records.map((r) => r.event_type)).toEqual(["trigger_press", "move"]);
    for (const record of records) {
      expect(Object.keys(record).sort()).toEqual([...EVENT_FIELDS].sort());
    }
  });

  it("flushes queued events in order once the service returns", async () => {
    const poster = new FakePoster();
    poster.unreachable = true;
    const storage = new MemoryStorage();
    const controller = makeController(poster, { storage });

    await controller.showStimulus("c01");
    await controller.submit({ kind: "press" });
    expect(controller.queuedCount).toBe(3);

    poster.unreachable = false;
    const flushed = await controller.flush();
    expect(flushed).toBe(true);
    expect(controller.queuedCount).toBe(0);
    expect(poster.received.map((e) => e.event_type)).toEqual([
      "stimulus_start",
      "rating_shown",
      "trigger_press",
    ]);
    expect(storage.getItem("morphamood.queue.s1")).toBeNull();
  });

  it("preserves total order across a mid-sequence outage", async () => {
    const poster = new FakePoster();
    const controller = makeController(poster);

    await controller.submit({ kind: "press" });
    poster.unreachable = true;
    await controller.submit({ kind: "drag", x: 140, y: 100 });
    await controller.submit({ kind: "drag", x: 160, y: 100 });
    poster.unreachable = false;
    await controller.submit({ kind: "release" });

    expect(poster.received.map((e) => e.event_type)).toEqual([
      "trigger_press",
      "move",
      "move",
      "trigger_release",
    ]);
    expect(poster.received[1]?.payload?.r).toBeCloseTo(0.5, 12);
    expect(poster.received[2]?.payload?.r).toBeCloseTo(0.75, 12);
  });

  it("drops server-rejected events with a warning and keeps going", async () => {
    const poster = new FakePoster();
    const warnings: string[] = [];
    const controller = makeController(poster, { warn: (m) => warnings.push(m) });

    poster.rejectNext = new ServiceError(422, "protocol-error", "confirm in Edit mode");
    const rejected = await controller.submit({ kind: "confirm" });
    expect(rejected.delivered).toBe(true);
    expect(controller.queuedCount).toBe(0);
    expect(warnings.some((m) => m.includes("protocol-error"))).toBe(true);

    await controller.submit({ kind: "press" });
    expect(poster.received.map((e) => e.event_type)).toEqual(["trigger_press"]);
  });

  it("resumes a persisted queue in a fresh controller", async () => {
    const storage = new MemoryStorage();
    const offline = new FakePoster();
    offline.unreachable = true;
    const first = makeController(offline, { storage });
    await first.showStimulus("c01");
    await first.submit({ kind: "press" });
    expect(first.queuedCount).toBe(3);

    const online = new FakePoster();
    const second = makeController(online, { storage, clock: () => 0 });
    expect(second.queuedCount).toBe(3);
    await second.flush();
    expect(online.received.map((e) => e.event_type)).toEqual([
      "stimulus_start",
      "rating_shown",
      "trigger_press",
    ]);

    await second.submit({ kind: "release" });
    const last = online.received[online.received.length - 1] as RatingEventBody;
    expect(last.event_type).toBe("trigger_release");
    expect(last.t_mono).toBeGreaterThanOrEqual(online.received[2]?.t_mono as number);
  });
});
