// Derivation of everything the renderer shows from the server snapshot
// plus in-flight UI state. No story content originates here.

import type { StudioStore } from "./store";
import type { CandidateOut, EditReportOut, Provenance, SceneOut, SlotOut } from "./types";

export interface SlotVM {
  address: string;
  provenance: Provenance;
  stale: boolean;
  requires: string | null;
  actionable: boolean;
  pending: string | null;
  resolvedText: string | null;
  editedText: string | null;
  candidateCount: number;
  carouselIndex: number;
  shownCandidate: CandidateOut | null;
  acceptedIndex: number | null;
  shownIsAccepted: boolean;
  loopFlagged: boolean;
  loopCounts: [string, number][];
  editorOpen: boolean;
  draft: string;
}

export interface SceneTabVM {
  index: number;
  label: string;
  address: string;
  scene: SceneOut;
}

export interface PanelVM {
  id: string;
  label: string;
}

export interface MetricsRowVM {
  slot: string;
  levenshtein: number;
  relative: number | null;
  jaccard: number;
  lengthDelta: number;
  unigramOverlap: number;
  tcr: number;
  lcr: number;
}

export interface ViewModel {
  loaded: boolean;
  sessionId: string;
  logLine: string;
  promptSet: string;
  error: string | null;
  panels: PanelVM[];
  selectedPanel: string;
  title: SlotVM | null;
  characters: SlotVM | null;
  plot: SlotVM | null;
  locations: { name: string; slot: SlotVM }[];
  sceneTabs: SceneTabVM[];
  selectedScene: number;
  dialogue: SlotVM | null;
  metrics: MetricsRowVM[];
  missingSlots: string[];
  exportText: string | null;
  job: { status: string; error: string | null; failedSlot: string | null } | null;
  polling: boolean;
}

export const PANELS: PanelVM[] = [
  { id: "title", label: "Title" },
  { id: "characters", label: "Characters" },
  { id: "plot", label: "Plot" },
  { id: "locations", label: "Locations" },
  { id: "dialogue", label: "Dialogue" },
  { id: "metrics", label: "Metrics" },
  { id: "export", label: "Export" },
];

function slotVM(store: StudioStore, slot: SlotOut): SlotVM {
  const carouselIndex = store.carouselIndex(slot.address);
  const shown = slot.candidates[carouselIndex] ?? null;
  return {
    address: slot.address,
    provenance: slot.provenance,
    stale: slot.stale,
    requires: slot.upstream_missing,
    actionable: slot.upstream_missing === null,
    pending: store.pending[slot.address] ?? null,
    resolvedText: slot.resolved_text,
    editedText: slot.edited_text,
    candidateCount: slot.candidates.length,
    carouselIndex,
    shownCandidate: shown,
    acceptedIndex: slot.accepted,
    shownIsAccepted: slot.accepted !== null && slot.accepted === carouselIndex,
    loopFlagged: shown?.loop_flagged ?? false,
    loopCounts: shown ? Object.entries(shown.loop_counts) : [],
    editorOpen: store.editing[slot.address] ?? false,
    draft: store.drafts[slot.address] ?? slot.resolved_text ?? "",
  };
}

function metricsRow(report: EditReportOut): MetricsRowVM {
  return {
    slot: report.slot,
    levenshtein: report.levenshtein,
    relative: report.relative_levenshtein,
    jaccard: report.jaccard_lemma,
    lengthDelta: report.length_delta,
    unigramOverlap: report.repetition.ngram_overlap["1"] ?? 0,
    tcr: report.repetition.total_consecutive_repetition,
    lcr: report.repetition.longest_consecutive_repetition,
  };
}

export function deriveViewModel(store: StudioStore): ViewModel {
  const session = store.session;
  if (!session) {
    return {
      loaded: false,
      sessionId: "",
      logLine: "",
      promptSet: "",
      error: store.error,
      panels: PANELS,
      selectedPanel: store.selectedPanel,
      title: null,
      characters: null,
      plot: null,
      locations: [],
      sceneTabs: [],
      selectedScene: 0,
      dialogue: null,
      metrics: [],
      missingSlots: [],
      exportText: null,
      job: null,
      polling: store.polling,
    };
  }
  const byAddress = new Map(session.slots.map((slot) => [slot.address, slot]));
  const vm = (address: string): SlotVM | null => {
    const slot = byAddress.get(address);
    return slot ? slotVM(store, slot) : null;
  };
  const sceneTabs: SceneTabVM[] = session.scenes.map((scene) => ({
    index: scene.index,
    label: `Scene ${scene.index + 1}`,
    address: `dialogue:${scene.index}`,
    scene,
  }));
  const selectedScene = Math.min(store.sceneTab, Math.max(sceneTabs.length - 1, 0));
  return {
    loaded: true,
    sessionId: session.id,
    logLine: session.log_line,
    promptSet: session.prompt_set,
    error: store.error,
    panels: PANELS,
    selectedPanel: store.selectedPanel,
    title: vm("title"),
    characters: vm("characters"),
    plot: vm("plot"),
    locations: session.locations.map((name) => ({
      name,
      slot: slotVM(store, byAddress.get(`location:${name}`)!),
    })),
    sceneTabs,
    selectedScene,
    dialogue: sceneTabs.length > 0 ? vm(`dialogue:${selectedScene}`) : null,
    metrics: (store.reports ?? []).map(metricsRow),
    missingSlots: session.slots
      .filter((slot) => slot.resolved_text === null)
      .map((slot) => slot.address),
    exportText: store.exportText,
    job: store.job
      ? { status: store.job.status, error: store.job.error, failedSlot: store.job.failed_slot }
      : null,
    polling: store.polling,
  };
}
