export { clampCursor } from "./cursor";
export {
  FACE_GEOMETRY,
  FACE_SCHEMA,
  RenderError,
  renderScene,
  validateFeatures,
} from "./scene";
export type {
  CircleShape,
  CurveShape,
  CursorDot,
  EllipseShape,
  GridLayer,
  MouthShape,
  NoseShape,
  SceneDescription,
  SchemaParameter,
} from "./scene";
export {
  DISPLAY_ROUNDING,
  ServiceClient,
  ServiceError,
  displayScore,
} from "./client";
export type {
  CommittedRating,
  CreateSessionRequest,
  CurrentReadout,
  FinalizeResult,
  Interpolation,
  SessionSummary,
} from "./client";
export { GestureController, MemoryStorage, gestureToEvent } from "./events";
export type {
  CanvasViewport,
  ControllerOptions,
  EventPoster,
  Gesture,
  QueueStorage,
  SubmitResult,
} from "./events";
export type { Cursor, FeatureVector, Mode, RatingEventBody, VAScore } from "./types";
