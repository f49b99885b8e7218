/** Payload types of the artifact server's JSON endpoints. */

export interface DendrogramPayload {
  n_samples: number;
  linkage: string;
  /** Merge rows [left, right, distance, size]; merge i creates node n_samples + i. */
  merges: Array<[number, number, number, number]>;
  row_ids?: string[];
}

export interface ClusterGroup {
  cluster_id: number;
  size: number;
  scenario_ids: string[];
}

export interface ClustersResponse {
  threshold: number;
  n_clusters: number;
  clusters: ClusterGroup[];
}

export interface ScenarioSummary {
  scenario_id: string;
  category: string;
  frame_start: number;
  frame_end: number;
  ego_id: number;
  challenger_id: number;
  challenger_class: string;
  pet: number;
  min_distance: number;
  n_others: number;
  label: string | null;
}

export interface TrackDict {
  track_id: number;
  ru_class: string;
  width: number;
  length: number;
  frames: number[];
  x: number[];
  y: number[];
  heading: number[];
  [extra: string]: unknown;
}

export interface ScenarioDetail {
  scenario_id: string;
  recording_id: string;
  category: string;
  frame_start: number;
  frame_end: number;
  frame_rate: number;
  ego: TrackDict;
  challenger: TrackDict;
  others: TrackDict[];
  interaction: {
    ego_id: number;
    challenger_id: number;
    min_distance: number;
    pet: number;
    ego_frame_at_min: number;
    challenger_frame_at_min: number;
  };
  key_frame: { frame: number; source: string; ego_pose: [number, number, number]; clamped: boolean };
  label: string | null;
}

export interface GridResponse {
  scenario_id: string;
  channel: string;
  height: number;
  width: number;
  values: number[][];
}

export interface ClusterReport {
  cluster_id: number;
  size: number;
  majority_label: string | null;
  accuracy: number;
}

export interface ValidationReport {
  threshold: number;
  n_clusters: number;
  overall_accuracy: number;
  label_source: string;
  per_cluster: ClusterReport[];
}

export interface MetricsPayload {
  label_source?: string;
  thresholds?: number[];
  reports: ValidationReport[];
  skipped?: string;
}

export interface BackgroundPayload {
  recording_id: string;
  traffic_space_name: string;
  /** [xMin, xMax, yMin, yMax] in meters. */
  extent: [number, number, number, number];
}

export interface LabelsPayload {
  labels: Record<string, string>;
  source: string;
}
