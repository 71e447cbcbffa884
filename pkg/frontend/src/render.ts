// Pure HTML rendering of the view model. Kept free of DOM and network
// access so display fidelity is testable as string/DOM assertions.

import type { SlotVM, ViewModel } from "./viewModel";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

function button(action: string, address: string, label: string, extra = ""): string {
  return `<button data-action="${action}" data-address="${escapeHtml(address)}" ${extra}>${label}</button>`;
}

function loopRibbon(slot: SlotVM): string {
  if (!slot.loopFlagged) return "";
  const counts = slot.loopCounts
    .map(([block, count]) => `<li><code>${escapeHtml(block)}</code> appears ${count} times</li>`)
    .join("");
  return `<div class="loop-ribbon" data-role="loop-warning">repetition detected<ul>${counts}</ul></div>`;
}

function requiresNote(slot: SlotVM): string {
  if (slot.requires === null) return "";
  return (
    `<p class="requires" data-role="requires">requires <code>${escapeHtml(slot.requires)}</code> ` +
    button("generate-upstream", slot.requires, "generate upstream") +
    `</p>`
  );
}

function carousel(slot: SlotVM): string {
  if (slot.candidateCount === 0) return `<p class="empty-slot">no candidates yet</p>`;
  const shown = slot.shownCandidate;
  const badge = slot.shownIsAccepted ? `<span class="badge accepted" data-role="accepted-badge">accepted</span>` : "";
  const seed = shown ? `<span class="badge seed">seed ${shown.seed}</span>` : "";
  return `
    <div class="carousel" data-role="carousel">
      <div class="carousel-nav">
        ${button("carousel-prev", slot.address, "&#8592;")}
        <span data-role="carousel-position">${slot.carouselIndex + 1} / ${slot.candidateCount}</span>
        ${button("carousel-next", slot.address, "&#8594;")}
        ${seed} ${badge}
      </div>
      <pre class="candidate-text" data-role="candidate-text">\n${escapeHtml(shown?.raw_text ?? "")}</pre>
      ${loopRibbon(slot)}
      ${slot.shownIsAccepted ? "" : button("accept", slot.address, "accept this one", `data-index="${slot.carouselIndex}"`)}
    </div>`;
}

function editor(slot: SlotVM): string {
  if (!slot.editorOpen) {
    return button("open-editor", slot.address, "edit");
  }
  return `
    <div class="editor" data-role="editor">
      <textarea data-role="editor-text" data-address="${escapeHtml(slot.address)}" rows="8">${escapeHtml(slot.draft)}</textarea>
      ${button("save-edit", slot.address, "save edit")}
      ${button("close-editor", slot.address, "cancel")}
    </div>`;
}

export function renderSlot(slot: SlotVM, heading: string): string {
  const staleBadge = slot.stale
    ? `<span class="badge stale" data-role="stale-badge">stale upstream</span>`
    : "";
  const pending = slot.pending
    ? `<span class="badge pending" data-role="pending">${escapeHtml(slot.pending)}&#8230;</span>`
    : "";
  const resolved =
    slot.resolvedText === null
      ? ""
      : `<pre class="slot-text prov-${slot.provenance}" data-role="resolved-text" data-provenance="${slot.provenance}">\n${escapeHtml(slot.resolvedText)}</pre>`;
  const controls = slot.actionable
    ? `${button("generate", slot.address, "new seed")} ${button("continue", slot.address, "continue")} ${editor(slot)}`
    : "";
  return `
    <section class="slot" data-slot="${escapeHtml(slot.address)}">
      <h2>${escapeHtml(heading)} ${staleBadge} ${pending}</h2>
      ${requiresNote(slot)}
      ${resolved}
      ${slot.actionable ? carousel(slot) : ""}
      ${controls}
    </section>`;
}

function renderLocations(vm: ViewModel): string {
  if (vm.locations.length === 0) {
    return `<p class="requires" data-role="requires">requires <code>plot</code></p>`;
  }
  return vm.locations.map(({ name, slot }) => renderSlot(slot, name)).join("\n");
}

function renderDialogue(vm: ViewModel): string {
  if (vm.sceneTabs.length === 0) {
    return `<p class="requires" data-role="requires">requires <code>plot</code></p>`;
  }
  const tabs = vm.sceneTabs
    .map(
      (tab) =>
        `<button class="scene-tab${tab.index === vm.selectedScene ? " active" : ""}" data-action="select-scene" data-index="${tab.index}" data-role="scene-tab">${escapeHtml(tab.label)}</button>`,
    )
    .join("");
  const scene = vm.sceneTabs[vm.selectedScene].scene;
  const sceneInfo = `
    <dl class="scene-info">
      <dt>Place</dt><dd data-role="scene-place">${escapeHtml(scene.place)}</dd>
      <dt>Plot element</dt><dd data-role="scene-element">${escapeHtml(scene.plot_element)}</dd>
      <dt>Beat</dt><dd data-role="scene-beat">${escapeHtml(scene.beat)}</dd>
    </dl>`;
  const slot = vm.dialogue ? renderSlot(vm.dialogue, `Scene ${vm.selectedScene + 1} dialogue`) : "";
  return `<nav class="scene-tabs">${tabs}</nav>${sceneInfo}${slot}`;
}

function renderMetrics(vm: ViewModel): string {
  if (vm.metrics.length === 0) return `<p>no slots with content yet</p>`;
  const rows = vm.metrics
    .map(
      (row) => `
      <tr data-role="metrics-row" data-slot="${escapeHtml(row.slot)}">
        <td>${escapeHtml(row.slot)}</td>
        <td data-role="levenshtein">${row.levenshtein}</td>
        <td data-role="relative">${row.relative === null ? "n/a" : row.relative}</td>
        <td data-role="jaccard">${row.jaccard}</td>
        <td data-role="length-delta">${row.lengthDelta}</td>
        <td data-role="unigram">${row.unigramOverlap}</td>
        <td data-role="tcr">${row.tcr}</td>
        <td data-role="lcr">${row.lcr}</td>
      </tr>`,
    )
    .join("");
  return `
    <table class="metrics">
      <thead><tr><th>slot</th><th>levenshtein</th><th>relative</th><th>jaccard</th><th>length delta</th><th>1-gram overlap</th><th>TCR</th><th>LCR</th></tr></thead>
      <tbody>${rows}</tbody>
    </table>`;
}

function renderExport(vm: ViewModel): string {
  if (vm.missingSlots.length > 0) {
    const items = vm.missingSlots
      .map((address) => `<li data-role="missing-slot"><code>${escapeHtml(address)}</code></li>`)
      .join("");
    return `<p>script incomplete; unresolved slots:</p><ul class="missing-checklist" data-role="missing-checklist">${items}</ul>`;
  }
  const body =
    vm.exportText === null
      ? ""
      : `<pre class="export-text" data-role="export-text">\n${escapeHtml(vm.exportText)}</pre>`;
  return `${button("load-export", "", "fetch export")} ${button("download-export", "", "download")}${body}`;
}

function renderJob(vm: ViewModel): string {
  const jobState = vm.job
    ? `<span data-role="job-status">autopilot: ${escapeHtml(vm.job.status)}${vm.job.failedSlot ? ` (failed at ${escapeHtml(vm.job.failedSlot)})` : ""}</span>`
    : "";
  return `${button("start-full", "", "generate full script")} ${jobState}`;
}

export function renderApp(vm: ViewModel): string {
  if (!vm.loaded) {
    return `<main class="studio"><p data-role="loading">loading session&#8230;</p>${
      vm.error ? `<p class="error" data-role="error">${escapeHtml(vm.error)}</p>` : ""
    }</main>`;
  }
  const nav = vm.panels
    .map(
      (panel) =>
        `<button class="panel-tab${panel.id === vm.selectedPanel ? " active" : ""}" data-action="select-panel" data-panel="${panel.id}" data-role="panel-tab">${escapeHtml(panel.label)}</button>`,
    )
    .join("");
  let body = "";
  switch (vm.selectedPanel) {
    case "title":
      body = vm.title ? renderSlot(vm.title, "Title") : "";
      break;
    case "characters":
      body = vm.characters ? renderSlot(vm.characters, "Characters") : "";
      break;
    case "plot":
      body = vm.plot ? renderSlot(vm.plot, "Plot") : "";
      break;
    case "locations":
      body = renderLocations(vm);
      break;
    case "dialogue":
      body = renderDialogue(vm);
      break;
    case "metrics":
      body = renderMetrics(vm);
      break;
    case "export":
      body = renderExport(vm);
      break;
  }
  return `
    <main class="studio">
      <header>
        <h1>dramaturg studio</h1>
        <p class="log-line" data-role="log-line">${escapeHtml(vm.logLine)}</p>
        <p class="session-meta">session <code data-role="session-id">${escapeHtml(vm.sessionId)}</code> &middot; prompt set <code>${escapeHtml(vm.promptSet)}</code></p>
        ${renderJob(vm)}
        ${vm.error ? `<p class="error" data-role="error">${escapeHtml(vm.error)} ${button("clear-error", "", "dismiss")}</p>` : ""}
      </header>
      <nav class="panel-nav">${nav}</nav>
      <div class="panel-body">${body}</div>
    </main>`;
}
