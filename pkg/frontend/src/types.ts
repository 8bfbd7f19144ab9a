/** JSON shapes as the server sends them. Field names match the API verbatim. */

export type StageLabel = "vague" | "decent" | "fine";
export type StageColor = "red" | "yellow" | "green";
export type AttributeStatus = "violated" | "pending_human" | "satisfied";
export type Characteristic = "strong" | "medium" | "weak";
export type Hat = "yellow" | "black" | "white" | "green" | "red";
export type ReviewStatus = "open" | "done" | "reopened";

export interface Finding {
  fingerprint: string;
  metric_id: string;
  attribute: string;
  characteristic: Characteristic;
  element_path: string;
  message: string;
  suggestion: string;
}

export interface Assessment {
  entry_id: string;
  seq_no: number;
  content_hash: string;
  stage: StageLabel;
  color: StageColor;
  previous_stage: StageLabel | null;
  demoted: boolean;
  statuses: Record<string, AttributeStatus>;
  findings: Finding[];
  delta: { new: Finding[]; resolved: Finding[] };
  generated_at: string;
}

export interface SnapshotRow {
  seq_no: number;
  content_hash: string;
  author: string;
  created_at: string;
  source_text?: string;
}

export interface ReviewRow {
  review_id: string;
  hat: Hat;
  text: string;
  status: ReviewStatus;
  snapshot_ref: number;
  created_at: string;
  updated_at: string;
}

export interface AttestationRow {
  attribute: string;
  content_hash: string;
  reviewer: string;
  verdict: "pass" | "fail";
  created_at: string;
}

export interface OverrideRow {
  metric_id: string;
  element_path: string;
  justification: string;
  author: string;
  created_at: string;
  revoked: boolean;
}

export interface EntrySummary {
  entry_id: string;
  created_at: string;
  head: SnapshotRow;
  stage: StageLabel;
  color: StageColor;
  finding_count: number;
  review_count: number;
}

export interface EntryDetail {
  entry_id: string;
  created_at: string;
  snapshots: SnapshotRow[];
  reviews: ReviewRow[];
  attestations: AttestationRow[];
  overrides: OverrideRow[];
  assessment: Assessment;
}

export type EventType = "snapshot" | "assessment" | "review" | "attestation" | "override";

/** One frame from /api/events. `data` depends on `type`; review and
 * override frames carry an extra `action` field next to the row. */
export interface StreamEvent {
  id: number;
  type: EventType;
  entry_id: string;
  data: Record<string, unknown>;
}

// Display grouping for the status chips. The server's assessment keys
// statuses by attribute name; this maps each name to its column.
export const CHARACTERISTIC_OF: Record<string, Characteristic> = {
  defect_freeness: "strong",
  meta_model_conformity: "strong",
  transformability: "strong",
  confinement: "medium",
  understandability: "medium",
  maintainability: "medium",
  semantic_validity: "weak",
  completeness: "weak",
  purpose_extraction: "weak",
  appeal: "weak",
};

export const WEAK_ATTRIBUTES = ["semantic_validity", "completeness", "purpose_extraction", "appeal"];

export const HATS: Hat[] = ["yellow", "black", "white", "green", "red"];
