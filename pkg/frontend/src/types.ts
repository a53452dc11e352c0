// Payload shapes of the review API. Field names mirror the JSON exactly;
// the UI never derives its own numbers from these, it only displays them.

export interface RuleRef {
  tool: string;
  rule_id: string;
}

export interface RuleDetail {
  title: string;
  description: string;
  code_examples: { kind: string; source_text: string }[];
}

export interface SimilarityScores {
  term_sim: number;
  semt_sim: number;
  code_sim: number;
  description_sim: number;
}

export interface OverlapInfo {
  ratio_a: number;
  ratio_b: number;
  trigger_a: number;
  trigger_b: number;
  // null on pairs locked before the file-overlap stage measured them
  file_jaccard: number | null;
}

export interface SharedWarning {
  project: string;
  file: string;
  line: number;
}

export type PairStatus = 'pending' | 'confirmed' | 'rejected' | 'needs_discussion';

export interface Candidate {
  id: string;
  rule_a: RuleRef;
  rule_b: RuleRef;
  rule_a_detail?: RuleDetail;
  rule_b_detail?: RuleDetail;
  scores: SimilarityScores;
  stage: string;
  status: PairStatus;
  overlap?: OverlapInfo;
  sample_shared_warnings?: SharedWarning[];
}

export interface MethodLocation {
  name: string;
  start: number;
  end: number;
}

export type WarnedBy = 'side_a_only' | 'side_b_only';

export interface IncLabel {
  verdict: string;
  pattern: string | null;
}

export interface Inconsistency {
  id: string;
  pair_id: string;
  project: string;
  file: string;
  criterion: 'line' | 'method';
  warned_by: WarnedBy;
  location: { line?: number; method?: MethodLocation };
  rule_a: RuleRef;
  rule_b: RuleRef;
  label: IncLabel | null;
  context: string[] | null;
}

export interface Page<T> {
  items: T[];
  page: number;
  size: number;
  total: number;
}

export interface PairProgress {
  total: number;
  pending: number;
  confirmed: number;
  rejected: number;
  needs_discussion: number;
}

export interface IncProgress {
  total: number;
  labeled: number;
  bug: number;
  not_a_bug: number;
  open: number;
}

export interface Progress {
  pairs: PairProgress;
  inconsistencies: IncProgress;
}

export interface Pattern {
  id: string;
  label: string;
}

export interface FindingRow {
  tool: string;
  rule_id: string;
  category: string;
  pattern: string;
  pattern_label: string;
  occurrences: number;
  status: string;
}

export type FindingCategory = 'FN_implementation' | 'FN_definition' | 'FP';

export interface Report {
  funnel: Progress;
  findings: Record<FindingCategory, FindingRow[]>;
  by_tool: Record<string, Record<string, number>>;
  confirmed_pairs: string[];
}

export type PairVerdict = 'accept' | 'reject';

// The inconsistency verdict vocabulary; patterns come from GET /patterns.
export const INC_VERDICTS = [
  { value: 'false_negative_impl', label: 'False negative (implementation)' },
  { value: 'false_negative_def', label: 'False negative (rule definition)' },
  { value: 'false_positive', label: 'False positive' },
  { value: 'not_a_bug', label: 'Not a bug' },
  { value: 'undecided', label: 'Undecided' },
] as const;

export type IncVerdict = (typeof INC_VERDICTS)[number]['value'];

export interface VerdictBody {
  reviewer: string;
  verdict: string;
  pattern?: string | null;
  note?: string;
}
