/** Wire types, mirroring the service's JSON schemas exactly. */

export interface ScreenProfile {
  width_mm: number;
  height_mm: number;
  width_px: number;
  height_px: number;
  max_luminance_cdm2: number;
  black_luminance_cdm2: number;
}

export interface ViewingSample {
  distance_mm: number;
  ambient_lux: number;
  timestamp_ms: number;
}

export interface Channel {
  kind: 'acuity' | 'color' | 'orientation' | 'scotopic';
  axis?: 'protan' | 'deutan' | 'tritan';
  axis_deg?: number;
}

export interface StimulusSpec {
  channel: Channel;
  intensity: number;
  target_descriptor: string;
  distractor_descriptors: string[];
  position_px: [number, number];
  rendered_size_px: number;
  mode: 'mini_game' | 'integrated';
  feasible: boolean;
}

export type TrialResponse = 'correct' | 'incorrect' | 'no_response';

export interface TrialRecord {
  v: 1;
  trial_id: string;
  session_id: string;
  spec: StimulusSpec;
  view: ViewingSample;
  response: TrialResponse;
  response_time_ms: number;
  credit_awarded: boolean;
}

export interface FitSummary {
  threshold_alpha: number;
  slope_beta: number;
  guess_gamma: number;
  lapse_lambda: number;
  ci_alpha: [number, number];
  n_trials: number;
  floor_flag: boolean;
  ceiling_flag: boolean;
  level_min: number;
  level_max: number;
  log_likelihood: number;
}

export interface SeriesPoint {
  timestamp_ms: number;
  threshold: number;
  ci: [number, number];
}

export interface Series {
  child_id: string;
  channel: string;
  condition_bin: string;
  points: SeriesPoint[];
}

export type ScreenKind =
  | 'no_flag'
  | 'myopia_suspect'
  | 'hyperopia_suspect'
  | 'astigmatism_suspect'
  | 'cvd_suspect'
  | 'nyctalopia_suspect';

export interface ScreenResult {
  kind: ScreenKind;
  effect_size: number;
  evidence: Record<string, unknown>;
  axis_deg?: number;
  cvd_type?: string;
}

export interface Alert {
  child_id: string;
  channel: string;
  window: [number, number];
  effect_size: number;
  recommendation_text: string;
  kind: string;
}

export interface Report {
  v: 1;
  child_id: string;
  trial_counts: Record<string, number>;
  fits: Record<string, FitSummary>;
  series: Record<string, Series>;
  screens: Record<string, ScreenResult>;
  alerts: Alert[];
}

export interface Ack {
  v: 1;
  acknowledged: boolean;
  duplicate: boolean;
}
