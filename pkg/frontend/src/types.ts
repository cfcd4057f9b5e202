// Domain types shared by the face renderer, the gesture controller, and the
// session-service client.

export type Mode = "View" | "Edit";

export interface Cursor {
  r: number;
  /** degrees counter-clockwise from the positive valence axis, in (-180, 180] */
  phi: number;
}

/** Facial parameter values keyed by parameter name. */
export type FeatureVector = Record<string, number>;

export interface VAScore {
  valence: number;
  arousal: number;
}

/**
 * Event record as the rating service accepts it. The service fills
 * session_id, subject_id, method, and t_wall from the session when they are
 * omitted; the offline queue stores fully filled records.
 */
export interface RatingEventBody {
  event_type: string;
  t_mono: number;
  session_id?: string;
  subject_id?: string;
  method?: string;
  stimulus_id?: string | null;
  t_wall?: string;
  payload?: Record<string, number> | null;
}
