/**
 * Mirrors of the service's JSON wire shapes.
 *
 * The UI never computes statistics; these types are the whole contract.
 * Field names stay snake_case to match the payloads byte for byte.
 */

export interface WireParameter {
  name: string;
  levels: string[];
  ordinal: boolean;
}

export interface DatasetDocument {
  dataset_id: string;
  target: string;
  row_count: number;
  parameters: WireParameter[];
}

/** Value fields are absent when count is 0. */
export interface WireStats {
  count: number;
  percentile_cuts: number[];
  min?: number;
  max?: number;
  mean?: number;
  range?: number;
  percentile_values?: number[];
}

export interface WireDensity {
  positions: number[];
  densities: number[];
  bandwidth: number;
}

export interface WireBar {
  parameter: string;
  level: string;
  selected: boolean;
  available: boolean;
  stats: WireStats;
  density: WireDensity | null;
}

export interface ExplorerGroup {
  name: string;
  enabled: boolean;
  levels: WireBar[];
}

export interface ExplorerPayload {
  target_axis: { min: number | null; max: number | null };
  parameters: ExplorerGroup[];
}

export interface AggregatePayload {
  matched_rows: number;
  available: boolean;
  stats: WireStats;
  density: WireDensity | null;
}

export interface WireFilterParameter {
  name: string;
  enabled: boolean;
  selected_levels: string[];
}

export interface WireFilter {
  parameters: WireFilterParameter[];
}

export interface ProvenanceEntry {
  stage: number;
  label: string;
  min: number | null;
  max: number | null;
  replicated_from: number | null;
  filter: WireFilter;
}

export interface KSShape {
  statistic: number;
  p_value: number;
  n1: number;
  n2: number;
}

export interface SamplePlan {
  fraction: number;
  seed: number;
  sampled_rows: number;
  reason: string;
  ks: KSShape | null;
}

export interface SessionDocument {
  session_id: string;
  dataset_id: string;
  target_name: string;
  row_count: number;
  cuts: number[];
  grid_points: number | null;
  sample_plan: SamplePlan;
  filter: WireFilter;
  provenance: ProvenanceEntry[];
}

export type FilterOperation =
  | { op: 'toggle_level'; parameter: string; level: string }
  | { op: 'set_levels'; parameter: string; levels: string[] }
  | { op: 'toggle_parameter'; parameter: string }
  | { op: 'set_enabled'; parameter: string; enabled: boolean };

export interface MutationResponse {
  filter: WireFilter;
  provenance_entry: ProvenanceEntry;
  explorer: ExplorerPayload;
  aggregate: AggregatePayload;
}

export interface SearchStep {
  step: number;
  configuration: Record<string, string>;
  value: number | null;
  feasible: boolean;
  best_value: number | null;
  accepted: boolean | null;
}

export interface SearchTrace {
  algorithm: string;
  objective: string;
  budget?: number | null;
  seed?: number | null;
  steps: SearchStep[];
  best_configuration?: Record<string, string> | null;
  best_value: number | null;
  total_evaluations?: number;
  wall_time_s?: number;
}

export interface JobSnapshot {
  job_id: string;
  status: 'running' | 'finished' | 'failed';
  algorithm: string;
  objective: string;
  error: string | null;
  trace?: SearchTrace;
}

export interface RecoveryPoint {
  fraction: number;
  top1: number;
  top2: number;
  top3: number;
}

export interface ImportancePayload {
  parameters: string[];
  scores: number[];
  ranking: string[];
  recovery: RecoveryPoint[] | null;
}
