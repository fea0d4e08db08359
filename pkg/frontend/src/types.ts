/** Wire payloads served by the session service. */

export interface RadarModelPayload {
  axis_count: number;
  labels: [string, string][];
  radii: number[];
  vertices: [number, number][];
  grid_rings: number[];
}

export interface CardFeatures {
  e: number;
  cp: number;
  cr: number;
  o: number;
  i: number;
}

export interface CardPayload {
  card_id: string;
  item_id: string;
  features: CardFeatures;
  radar: RadarModelPayload;
  state: string;
  radar_animated: boolean;
}

export interface StackPayload {
  session_id?: string;
  status: string;
  top: CardPayload | null;
  next: CardPayload | null;
  preloaded_count: number;
}

export interface SessionCreated {
  session_id: string;
  student_id: string;
  status: string;
  top: CardPayload | null;
  preloaded_count: number;
}

export interface GestureResult {
  resolution: "dragging" | "canceled" | "swiped" | "engaged";
  direction?: string;
  item_ref?: string;
  card?: CardPayload;
  top?: CardPayload | null;
  next?: CardPayload | null;
  preloaded_count?: number;
  status?: string;
  transform?: TransformWire;
}

export interface ProgressSummary {
  student_id: string;
  theta: number;
  score: number;
  cards_seen: number;
  cards_skipped: number;
  cards_answered: number;
  feature_history: [number, number[]][];
  area_history: number[];
}

export interface AnswerResult extends StackPayload {
  progress: ProgressSummary;
}

/** Constants served by GET /config; the UI must not hardcode them. */
export interface UiConfig {
  swipe_dx_threshold: number;
  swipe_vx_threshold: number;
  max_rotation_deg: number;
  next_scale_min: number;
  next_opacity_min: number;
  tap_deadzone_widths: number;
}

export interface TransformWire {
  top: { translate_x: number; rotate_deg: number; scale: number };
  next: { scale: number; opacity: number };
}
