// API payload shapes, mirrored from the service's JSON bodies.
// The UI renders these verbatim; it computes no scores of its own.

export interface ApiErrorBody {
  code: "not_found" | "conflict" | "invalid_input" | "unavailable";
  message: string;
}

export interface HealthPayload {
  status: string;
  backend: string;
  head_version: string | null;
  queue: { pending: number; processing: number; complete: number };
}

export interface VerdictPayload {
  valid: boolean;
  confidence: number;
  reasoning: string;
  source: string;
}

export interface ReviewPayload {
  review_id: string;
  item_id: string;
  source: string;
  target: string;
  relation: string;
  routed_reason: string;
  llm_verdicts: VerdictPayload[];
  rule_verdict: VerdictPayload | null;
  graph_version: string;
  status: string;
  decision: string | null;
  reviewer: string | null;
}

export interface AttributionPayload {
  phi: Record<string, number>;
  normalized_phi: Record<string, number>;
  method: string;
  efficiency_gap: number;
  grand_value: number;
  empty_value: number;
  empty_overlap_flagged: boolean;
  permutations_sampled: number | null;
  standard_errors: Record<string, number> | null;
}

export interface TopPathPayload {
  nodes: string[];
  crown: string;
  probability: number;
}

export interface ReportPayload {
  version: string;
  raw_exposure: number;
  normalized_exposure: number;
  exposure_max: number;
  pqri: number;
  mode: string;
  alpha: number | null;
  n_nodes: number;
  n_paths: number | null;
  domains: string[];
  top_paths: TopPathPayload[];
  attribution: AttributionPayload | null;
}

export interface NodePayload {
  id: string;
  kind: string;
  label: string;
  resistance: number;
  business_weight: number;
  crown_impact: number;
  is_entry: boolean;
  domains: string[];
  attributes: Record<string, string>;
  heat?: number;
}

export interface EdgePayload {
  source: string;
  target: string;
  relation: string;
  exploitability: number;
  validation_status: string;
}

export interface GraphViewPayload {
  version: string;
  view: string;
  nodes?: NodePayload[];
  edges?: EdgePayload[];
  chokepoints?: ChokepointPayload[];
}

export interface ChokepointPayload {
  id: string;
  paths_through: number;
  is_vpn: boolean;
  resistance: number;
  business_weight: number;
}

export interface SettingsPayload {
  model_name: string;
  endpoint: string;
  votes_per_item: number;
  threshold_general: number;
  threshold_vpn_cloud: number;
  auto_approve_rules: [string, number][];
  scheduler_interval_seconds: number;
  crown_review_weight: number;
  crown_review_impact: number;
  batch_size: number;
  request_timeout_seconds: number;
}

export interface StatsPayload {
  total: number;
  pending: number;
  processing: number;
  validity_rate: number | null;
  mean_confidence: number | null;
  disagreement_rate: number | null;
}
