// Display fidelity: everything shown equals a field of the stubbed API
// payload, and re-mounting from the same server state reproduces the
// identical view.

import { describe, expect, it } from "vitest";

import { renderApp } from "../src/render";
import { deriveViewModel } from "../src/viewModel";
import type { StudioStore } from "../src/store";
import { clone, fixtureRoutes, loadedStore, metricsFixture, sessionFixture } from "./helpers";

function draw(store: StudioStore): HTMLElement {
  const root = document.createElement("div");
  root.innerHTML = renderApp(deriveViewModel(store));
  return root;
}

function text(root: HTMLElement, selector: string): string {
  const node = root.querySelector(selector);
  expect(node, selector).not.toBeNull();
  return node!.textContent ?? "";
}

describe("display fidelity against the stubbed API", () => {
  it("shows the resolved title and its provenance from the payload", async () => {
    const { store } = await loadedStore();
    const root = draw(store);
    const slot = sessionFixture.slots.find((s) => s.address === "title")!;
    expect(text(root, '[data-role="resolved-text"]')).toBe(slot.resolved_text);
    const span = root.querySelector('[data-role="resolved-text"]') as HTMLElement;
    expect(span.dataset.provenance).toBe(slot.provenance);
    expect(span.classList.contains(`prov-${slot.provenance}`)).toBe(true);
  });

  it("shows the carousel candidate text exactly as sent", async () => {
    const { store } = await loadedStore();
    const root = draw(store);
    const slot = sessionFixture.slots.find((s) => s.address === "title")!;
    const accepted = slot.candidates[slot.accepted!];
    expect(text(root, '[data-role="candidate-text"]')).toBe(accepted.raw_text);
    expect(text(root, '[data-role="carousel-position"]')).toBe(
      `${slot.accepted! + 1} / ${slot.candidates.length}`,
    );
  });

  it("renders one dialogue tab per scene in the payload (8 here)", async () => {
    const { store } = await loadedStore();
    store.selectPanel("dialogue");
    const root = draw(store);
    const tabs = root.querySelectorAll('[data-role="scene-tab"]');
    expect(tabs).toHaveLength(8);
    expect(sessionFixture.scenes).toHaveLength(8);
    expect(text(root, '[data-role="scene-place"]')).toBe(sessionFixture.scenes[0].place);
    expect(text(root, '[data-role="scene-beat"]')).toBe(sessionFixture.scenes[0].beat);
  });

  it("renders the dialogue slot for the selected scene", async () => {
    const { store } = await loadedStore();
    store.selectScene(2);
    const root = draw(store);
    const slot = sessionFixture.slots.find((s) => s.address === "dialogue:2")!;
    expect(text(root, '[data-role="resolved-text"]')).toBe(slot.resolved_text);
  });

  it("metric table cells equal the metrics payload fields", async () => {
    const { store } = await loadedStore();
    store.selectPanel("metrics");
    const root = draw(store);
    const rows = root.querySelectorAll('[data-role="metrics-row"]');
    expect(rows).toHaveLength(metricsFixture.length);
    for (const report of metricsFixture) {
      const row = root.querySelector(`[data-role="metrics-row"][data-slot="${report.slot}"]`)!;
      const cell = (role: string) => row.querySelector(`[data-role="${role}"]`)!.textContent;
      expect(cell("levenshtein")).toBe(String(report.levenshtein));
      expect(cell("relative")).toBe(
        report.relative_levenshtein === null ? "n/a" : String(report.relative_levenshtein),
      );
      expect(cell("jaccard")).toBe(String(report.jaccard_lemma));
      expect(cell("length-delta")).toBe(String(report.length_delta));
      expect(cell("tcr")).toBe(String(report.repetition.total_consecutive_repetition));
      expect(cell("lcr")).toBe(String(report.repetition.longest_consecutive_repetition));
    }
  });

  it("an unedited fixture renders a zero relative distance for plot", async () => {
    const { store } = await loadedStore();
    store.selectPanel("metrics");
    const root = draw(store);
    const row = root.querySelector('[data-role="metrics-row"][data-slot="plot"]')!;
    expect(row.querySelector('[data-role="relative"]')!.textContent).toBe("0");
  });

  it("remounting from the same server state reproduces the identical view", async () => {
    const panels = ["title", "characters", "plot", "locations", "dialogue", "metrics"];
    const htmlByPanel = async () => {
      const { store } = await loadedStore();
      const out: Record<string, string> = {};
      for (const panel of panels) {
        store.selectPanel(panel);
        out[panel] = draw(store).innerHTML;
      }
      return out;
    };
    const first = await htmlByPanel();
    const second = await htmlByPanel(); // a fresh load, as after a browser refresh
    expect(second).toEqual(first);
  });

  it("upstream-missing panels show the dependency and an affordance", async () => {
    const session = clone(sessionFixture);
    const plot = session.slots.find((s) => s.address === "plot")!;
    plot.upstream_missing = "characters";
    const { store } = await loadedStore(fixtureRoutes(session));
    store.selectPanel("plot");
    const root = draw(store);
    expect(text(root, '[data-role="requires"]')).toContain("characters");
    expect(root.querySelector('[data-action="generate-upstream"]')).not.toBeNull();
  });

  it("loop-flagged candidates show a repetition ribbon with block counts", async () => {
    const session = clone(sessionFixture);
    const slot = session.slots.find((s) => s.address === "dialogue:0")!;
    const shown = slot.candidates[slot.accepted!];
    shown.loop_flagged = true;
    shown.loop_counts = { "SAME LINE": 4 };
    const { store } = await loadedStore(fixtureRoutes(session));
    store.selectScene(0);
    const root = draw(store);
    const ribbon = root.querySelector('[data-role="loop-warning"]')!;
    expect(ribbon.textContent).toContain("repetition detected");
    expect(ribbon.textContent).toContain("SAME LINE");
    expect(ribbon.textContent).toContain("4 times");
  });

  it("stale slots carry a stale badge", async () => {
    const session = clone(sessionFixture);
    session.slots.find((s) => s.address === "plot")!.stale = true;
    const { store } = await loadedStore(fixtureRoutes(session));
    store.selectPanel("plot");
    const root = draw(store);
    expect(root.querySelector('[data-role="stale-badge"]')).not.toBeNull();
  });

  it("incomplete sessions list missing slots in the export panel", async () => {
    const session = clone(sessionFixture);
    const slot = session.slots.find((s) => s.address === "dialogue:4")!;
    slot.resolved_text = null;
    const { store } = await loadedStore(fixtureRoutes(session));
    store.selectPanel("export");
    const root = draw(store);
    const items = [...root.querySelectorAll('[data-role="missing-slot"]')];
    expect(items.map((node) => node.textContent)).toEqual(["dialogue:4"]);
  });

  it("complete sessions offer the export text once fetched", async () => {
    const routes = {
      ...fixtureRoutes(),
      [`GET /sessions/${sessionFixture.id}/export`]: { text: "THE SCRIPT BODY\n" },
    };
    const { store } = await loadedStore(routes);
    await store.loadExport();
    store.selectPanel("export");
    const root = draw(store);
    expect(text(root, '[data-role="export-text"]')).toBe("THE SCRIPT BODY\n");
  });
});
