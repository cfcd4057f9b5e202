// Pure scene construction for the morphable face widget.
//
// The scene lives in a unit-disk coordinate system: the polar grid has
// radius 1, the origin is the disk center, and the y axis points up
// (mathematical convention; canvas renderers flip y when drawing). Every
// geometric attribute below is a deterministic function of the feature
// vector, the mode, and the cursor, so tests can assert on attributes
// without touching pixels.

import type { Cursor, FeatureVector, Mode } from "./types";

export class RenderError extends Error {}

export interface SchemaParameter {
  name: string;
  min: number;
  max: number;
}

/** The six facial parameters the renderer understands, with their ranges. */
export const FACE_SCHEMA: readonly SchemaParameter[] = [
  { name: "mouth_curvature", min: -1, max: 1 },
  { name: "mouth_opening", min: 0, max: 1 },
  { name: "brow_bend_left", min: -1, max: 1 },
  { name: "brow_bend_right", min: -1, max: 1 },
  { name: "eye_closure", min: 0, max: 1 },
  { name: "nostril_flare", min: 0, max: 1 },
];

/** Fixed layout and styling constants, exported so tests can assert exact values. */
export const FACE_GEOMETRY = Object.freeze({
  headRadius: 0.78,
  headFill: "#c8c8c8",
  eyeOffsetX: 0.27,
  eyeCenterY: 0.22,
  eyeRx: 0.11,
  eyeOpenRy: 0.09,
  eyeFill: "#3a3a3a",
  browY: 0.4,
  browHalfSpan: 0.14,
  browBendSpan: 0.08,
  mouthY: -0.34,
  mouthHalfSpan: 0.26,
  mouthCurveSpan: 0.18,
  mouthGapMax: 0.16,
  noseCenterY: -0.06,
  noseHeight: 0.16,
  noseBaseWidth: 0.12,
  noseFlareGain: 0.6,
  cursorDotRadius: 0.03,
  cursorDotFill: "#2a2a2a",
  gridRingRadii: [0.5, 1.0] as readonly number[],
  gridSpokeStepDeg: 45,
  gridActiveColor: "#2c7fb8",
  gridInactiveColor: "#b4b4b4",
});

export interface CircleShape {
  cx: number;
  cy: number;
  r: number;
  fill: string;
}

export interface EllipseShape {
  cx: number;
  cy: number;
  rx: number;
  ry: number;
  fill: string;
}

/** Quadratic bezier: endpoints (x0,y0)-(x1,y1) with one control point. */
export interface CurveShape {
  x0: number;
  y0: number;
  cx: number;
  cy: number;
  x1: number;
  y1: number;
}

export interface MouthShape {
  upper: CurveShape;
  lower: CurveShape;
  /** signed vertical displacement of the lip control points; sign follows mouth_curvature */
  controlOffset: number;
  /** vertical separation of the two lip control points; proportional to mouth_opening */
  gap: number;
}

export interface NoseShape {
  cx: number;
  cy: number;
  /** bulge width, strictly increasing in nostril_flare */
  width: number;
  height: number;
}

export interface GridLayer {
  layer: "foreground" | "background";
  color: string;
  ringRadii: readonly number[];
  spokeStepDeg: number;
}

export interface CursorDot {
  x: number;
  y: number;
  radius: number;
  fill: string;
}

export interface SceneDescription {
  head: CircleShape;
  eyes: { left: EllipseShape; right: EllipseShape };
  brows: { left: CurveShape; right: CurveShape };
  mouth: MouthShape;
  nose: NoseShape;
  grid: GridLayer;
  cursor: CursorDot;
}

/** Reject feature vectors that do not match the renderer's schema exactly. */
export function validateFeatures(fv: FeatureVector): void {
  const known = new Set(FACE_SCHEMA.map((p) => p.name));
  for (const name of Object.keys(fv)) {
    if (!known.has(name)) {
      throw new RenderError(`unknown facial parameter ${JSON.stringify(name)}`);
    }
  }
  for (const param of FACE_SCHEMA) {
    const value = fv[param.name];
    if (typeof value !== "number" || !Number.isFinite(value)) {
      throw new RenderError(`parameter ${param.name} must be a finite number, got ${value}`);
    }
    if (value < param.min || value > param.max) {
      throw new RenderError(
        `parameter ${param.name}=${value} outside [${param.min}, ${param.max}]`,
      );
    }
  }
}

function brow(centerX: number, bend: number): CurveShape {
  const g = FACE_GEOMETRY;
  return {
    x0: centerX - g.browHalfSpan,
    y0: g.browY,
    cx: centerX,
    cy: g.browY + g.browBendSpan * bend,
    x1: centerX + g.browHalfSpan,
    y1: g.browY,
  };
}

function lip(controlY: number): CurveShape {
  const g = FACE_GEOMETRY;
  return {
    x0: -g.mouthHalfSpan,
    y0: g.mouthY,
    cx: 0,
    cy: controlY,
    x1: g.mouthHalfSpan,
    y1: g.mouthY,
  };
}

/**
 * Build the complete scene for one feature vector, view state, and cursor.
 *
 * Contracted relations: the mouth control points move vertically with the
 * sign of mouth_curvature and apart by mouth_opening; eye vertical radii
 * scale with (1 - eye_closure); nose width grows with nostril_flare; Edit
 * mode puts the grid colored in the foreground, View mode gray in the
 * background. Same inputs always produce an identical description.
 */
export function renderScene(fv: FeatureVector, mode: Mode, cursor: Cursor): SceneDescription {
  validateFeatures(fv);
  if (mode !== "View" && mode !== "Edit") {
    throw new RenderError(`mode must be "View" or "Edit", got ${JSON.stringify(mode)}`);
  }
  if (
    !Number.isFinite(cursor.r) || !Number.isFinite(cursor.phi)
    || cursor.r < 0 || cursor.r > 1
  ) {
    throw new RenderError(`cursor (r=${cursor.r}, phi=${cursor.phi}) outside the unit disk`);
  }

  const g = FACE_GEOMETRY;
  const curvature = fv["mouth_curvature"] as number;
  const opening = fv["mouth_opening"] as number;
  const closure = fv["eye_closure"] as number;
  const flare = fv["nostril_flare"] as number;

  const eyeRy = g.eyeOpenRy * (1 - closure);
  const controlOffset = g.mouthCurveSpan * curvature;
  const gap = g.mouthGapMax * opening;
  const phiRad = (cursor.phi * Math.PI) / 180;

  return {
    head: { cx: 0, cy: 0, r: g.headRadius, fill: g.headFill },
    eyes: {
      left: { cx: -g.eyeOffsetX, cy: g.eyeCenterY, rx: g.eyeRx, ry: eyeRy, fill: g.eyeFill },
      right: { cx: g.eyeOffsetX, cy: g.eyeCenterY, rx: g.eyeRx, ry: eyeRy, fill: g.eyeFill },
    },
    brows: {
      left: brow(-g.eyeOffsetX, fv["brow_bend_left"] as number),
      right: brow(g.eyeOffsetX, fv["brow_bend_right"] as number),
    },
    mouth: {
      upper: lip(g.mouthY + controlOffset + gap / 2),
      lower: lip(g.mouthY + controlOffset - gap / 2),
      controlOffset,
      gap,
    },
    nose: {
      cx: 0,
      cy: g.noseCenterY,
      width: g.noseBaseWidth * (1 + g.noseFlareGain * flare),
      height: g.noseHeight,
    },
    grid: mode === "Edit"
      ? {
        layer: "foreground",
        color: g.gridActiveColor,
        ringRadii: [...g.gridRingRadii],
        spokeStepDeg: g.gridSpokeStepDeg,
      }
      : {
        layer: "background",
        color: g.gridInactiveColor,
        ringRadii: [...g.gridRingRadii],
        spokeStepDeg: g.gridSpokeStepDeg,
      },
    cursor: {
      x: cursor.r * Math.cos(phiRad),
      y: cursor.r * Math.sin(phiRad),
      radius: g.cursorDotRadius,
      fill: g.cursorDotFill,
    },
  };
}
