// Wire types mirroring the studio service response models. The UI never
// derives story content on its own: everything rendered traces back to
// one of these payload fields.

export interface SamplingOut {
  nucleus_mass: number;
  temperature: number;
  max_tokens: number;
  seed: number;
}

export interface CandidateOut {
  raw_text: string;
  seed: number;
  sampling: SamplingOut;
  prompt_hash: string;
  created_at: string;
  loop_flagged: boolean;
  loop_counts: Record<string, number>;
}

export type Provenance = "generated" | "edited" | "mixed";

export interface SlotOut {
  address: string;
  kind: string;
  key: string;
  candidates: CandidateOut[];
  accepted: number | null;
  edited_text: string | null;
  provenance: Provenance;
  resolved_text: string | null;
  stale: boolean;
  upstream_missing: string | null;
}

export interface SceneOut {
  index: number;
  place: string;
  plot_element: string;
  beat: string;
  canonical_element: boolean;
}

export interface SessionState {
  id: string;
  log_line: string;
  prompt_set: string;
  slots: SlotOut[];
  scenes: SceneOut[];
  locations: string[];
  history_length: number;
}

export interface SessionSummary {
  id: string;
  log_line: string;
  prompt_set: string;
}

export interface RepetitionOut {
  ngram_overlap: Record<string, number>;
  total_consecutive_repetition: number;
  longest_consecutive_repetition: number;
}

export interface EditReportOut {
  slot: string;
  levenshtein: number;
  relative_levenshtein: number | null;
  jaccard_lemma: number;
  length_delta: number;
  repetition: RepetitionOut;
}

export interface JobOut {
  id: string;
  session_id: string;
  status: "queued" | "running" | "done" | "error";
  error: string | null;
  failed_slot: string | null;
}

export interface PromptSetsOut {
  prompt_sets: string[];
}
