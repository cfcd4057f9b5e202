import type { Cursor } from "./types";

/**
 * Map planar coordinates to a polar cursor, clamping outside points to the
 * rim. Mirrors the engine's clamp: the origin maps to (r=0, phi=0) and
 * angles are degrees counter-clockwise in (-180, 180].
 */
export function clampCursor(x: number, y: number): Cursor {
  if (!Number.isFinite(x) || !Number.isFinite(y)) {
    throw new RangeError(`planar coordinates must be finite, got (${x}, ${y})`);
  }
  const r = Math.hypot(x, y);
  if (r === 0) {
    return { r: 0, phi: 0 };
  }
  return { r: Math.min(r, 1), phi: (Math.atan2(y, x) * 180) / Math.PI };
}
