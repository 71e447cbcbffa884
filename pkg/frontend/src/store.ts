// Client-side state: the latest server session snapshot plus in-flight
// operation state (pending requests, carousel positions, editor drafts).
// At most one mutating request is in flight per slot; edits apply
// optimistically and roll back when the API rejects them.

import { ApiError, StudioApi } from "./api";
import type { EditReportOut, JobOut, SessionState, SlotOut } from "./types";

export const JOB_POLL_INTERVAL_MS = 1000;

export type Listener = () => void;

export interface StoreOptions {
  confirmFn?: (message: string) => boolean;
  pollIntervalMs?: number;
}

export class StudioStore {
  session: SessionState | null = null;
  reports: EditReportOut[] | null = null;
  exportText: string | null = null;
  selectedPanel = "title";
  sceneTab = 0;
  carousel: Record<string, number> = {};
  pending: Record<string, string | undefined> = {};
  drafts: Record<string, string | undefined> = {};
  editing: Record<string, boolean | undefined> = {};
  error: string | null = null;
  job: JobOut | null = null;

  private sessionId: string | null = null;
  private listeners: Listener[] = [];
  private pollTimer: ReturnType<typeof setInterval> | null = null;
  private readonly confirmFn: (message: string) => boolean;
  private readonly pollIntervalMs: number;

  constructor(
    private readonly api: StudioApi,
    options: StoreOptions = {},
  ) {
    this.confirmFn = options.confirmFn ?? ((message) => globalThis.confirm(message));
    this.pollIntervalMs = options.pollIntervalMs ?? JOB_POLL_INTERVAL_MS;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private emit(): void {
    for (const listener of this.listeners) listener();
  }

  slot(address: string): SlotOut | null {
    return this.session?.slots.find((s) => s.address === address) ?? null;
  }

  carouselIndex(address: string): number {
    const slot = this.slot(address);
    if (!slot || slot.candidates.length === 0) return 0;
    const raw = this.carousel[address] ?? slot.accepted ?? slot.candidates.length - 1;
    return Math.min(Math.max(raw, 0), slot.candidates.length - 1);
  }

  moveCarousel(address: string, delta: number): void {
    this.carousel[address] = this.carouselIndex(address) + delta;
    this.emit();
  }

  selectPanel(panel: string): void {
    this.selectedPanel = panel;
    this.emit();
  }

  selectScene(index: number): void {
    this.sceneTab = index;
    this.selectedPanel = "dialogue";
    this.emit();
  }

  openEditor(address: string): void {
    const slot = this.slot(address);
    this.editing[address] = true;
    this.drafts[address] = this.drafts[address] ?? slot?.resolved_text ?? "";
    this.emit();
  }

  closeEditor(address: string): void {
    this.editing[address] = false;
    delete this.drafts[address];
    this.emit();
  }

  setDraft(address: string, text: string): void {
    this.drafts[address] = text;
  }

  async load(sessionId: string): Promise<void> {
    this.sessionId = sessionId;
    await this.refresh();
  }

  async refresh(): Promise<void> {
    if (!this.sessionId) return;
    this.session = await this.api.getSession(this.sessionId);
    this.reports = await this.api.metrics(this.sessionId);
    this.emit();
  }

  private busy(address: string): boolean {
    return this.pending[address] !== undefined;
  }

  private fail(error: unknown): void {
    this.error = error instanceof ApiError ? error.message : String(error);
    this.emit();
  }

  clearError(): void {
    this.error = null;
    this.emit();
  }

  async generate(address: string, seed?: number): Promise<boolean> {
    if (!this.sessionId || this.busy(address)) return false;
    const slot = this.slot(address);
    if (slot && slot.edited_text !== null) {
      const ok = this.confirmFn(
        "Regenerating resets this slot to generated text and discards your edit. Continue?",
      );
      if (!ok) return false;
    }
    this.pending[address] = "generate";
    this.error = null;
    this.emit();
    try {
      await this.api.generate(this.sessionId, address, seed);
      await this.refresh();
      const after = this.slot(address);
      if (after) this.carousel[address] = after.candidates.length - 1;
      return true;
    } catch (error) {
      this.fail(error);
      return false;
    } finally {
      delete this.pending[address];
      this.emit();
    }
  }

  async continueSlot(address: string): Promise<boolean> {
    if (!this.sessionId || this.busy(address)) return false;
    this.pending[address] = "continue";
    this.error = null;
    this.emit();
    try {
      await this.api.continueSlot(this.sessionId, address);
      await this.refresh();
      const after = this.slot(address);
      if (after) this.carousel[address] = after.candidates.length - 1;
      return true;
    } catch (error) {
      this.fail(error);
      return false;
    } finally {
      delete this.pending[address];
      this.emit();
    }
  }

  async saveEdit(address: string): Promise<boolean> {
    if (!this.sessionId || this.busy(address)) return false;
    const slot = this.slot(address);
    const text = this.drafts[address];
    if (!slot || text === undefined) return false;
    // optimistic apply; the server snapshot is restored on failure
    const snapshot: SlotOut = { ...slot };
    slot.edited_text = text;
    slot.resolved_text = text;
    slot.provenance = slot.accepted !== null && text !== slot.candidates[slot.accepted]?.raw_text
      ? "mixed"
      : "edited";
    this.pending[address] = "edit";
    this.error = null;
    this.emit();
    try {
      await this.api.edit(this.sessionId, address, text);
      await this.refresh();
      this.closeEditor(address);
      return true;
    } catch (error) {
      Object.assign(slot, snapshot); // roll back the optimistic change
      this.fail(error);
      return false;
    } finally {
      delete this.pending[address];
      this.emit();
    }
  }

  async accept(address: string, index: number): Promise<boolean> {
    if (!this.sessionId || this.busy(address)) return false;
    this.pending[address] = "accept";
    this.error = null;
    this.emit();
    try {
      await this.api.accept(this.sessionId, address, index);
      await this.refresh();
      return true;
    } catch (error) {
      this.fail(error);
      return false;
    } finally {
      delete this.pending[address];
      this.emit();
    }
  }

  async loadExport(): Promise<void> {
    if (!this.sessionId) return;
    try {
      this.exportText = await this.api.exportText(this.sessionId);
      this.emit();
    } catch (error) {
      this.fail(error);
    }
  }

  async startFullGeneration(baseSeed = 0): Promise<void> {
    if (!this.sessionId || this.pollTimer !== null) return;
    this.error = null;
    try {
      this.job = await this.api.generateFull(this.sessionId, baseSeed);
      this.emit();
      this.pollTimer = setInterval(() => {
        void this.pollJob();
      }, this.pollIntervalMs);
    } catch (error) {
      this.fail(error);
    }
  }

  async pollJob(): Promise<void> {
    if (!this.job) return;
    try {
      this.job = await this.api.getJob(this.job.id);
      if (this.job.status === "done" || this.job.status === "error") {
        this.stopPolling();
        await this.refresh();
      }
      this.emit();
    } catch (error) {
      this.stopPolling();
      this.fail(error);
    }
  }

  stopPolling(): void {
    if (this.pollTimer !== null) {
      clearInterval(this.pollTimer);
      this.pollTimer = null;
    }
  }

  get polling(): boolean {
    return this.pollTimer !== null;
  }
}
