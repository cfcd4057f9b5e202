import { describe, expect, it } from "vitest";

import { clampCursor } from "../src/cursor";
import { mulberry32 } from "./helpers";

describe("clampCursor", () => {
  it("maps the origin to (r=0, phi=0)", () => {
    expect(clampCursor(0, 0)).toEqual({ r: 0, phi: 0 });
  });

  it("keeps interior points unchanged", () => {
    const c = clampCursor(0.3, 0);
    expect(c.r).toBeCloseTo(0.3, 12);
    expect(c.phi).toBe(0);
  });

  it("clamps outside points to the rim, preserving the angle", () => {
    expect(clampCursor(2, 0)).toEqual({ r: 1, phi: 0 });
    const diagonal = clampCursor(3, 3);
    expect(diagonal.r).toBe(1);
    expect(diagonal.phi).toBeCloseTo(45, 12);
  });

  it("measures angles counter-clockwise in degrees", () => {
    expect(clampCursor(0, 0.25).phi).toBeCloseTo(90, 12);
    expect(clampCursor(-0.5, 0).phi).toBeCloseTo(180, 12);
    expect(clampCursor(0, -0.25).phi).toBeCloseTo(-90, 12);
  });

  it("matches the polar formulas on seeded random points", () => {
    const rand = mulberry32(90101);
    for (let i = 0; i < 1000; i++) {
      const x = (rand() - 0.5) * 4;
      const y = (rand() - 0.5) * 4;
      if (x === 0 && y === 0) continue;
      const c = clampCursor(x, y);
      expect(c.r).toBe(Math.min(Math.hypot(x, y), 1));
      expect(c.phi).toBe((Math.atan2(y, x) * 180) / Math.PI);
      expect(c.phi).toBeGreaterThan(-180);
      expect(c.phi).toBeLessThanOrEqual(180);
      expect(c.r).toBeGreaterThanOrEqual(0);
      expect(c.r).toBeLessThanOrEqual(1);
    }
  });

  it("rejects non-finite coordinates", () => {
    expect(() => clampCursor(Number.NaN, 0)).toThrow(RangeError);
    expect(() => clampCursor(0, Number.POSITIVE_INFINITY)).toThrow(RangeError);
  });
});
