// Browser bootstrap: mounts the store-driven renderer onto #app and
// wires delegated events to store operations.

import { StudioApi } from "./api";
import { renderApp } from "./render";
import { StudioStore } from "./store";
import { deriveViewModel } from "./viewModel";
import "./style.css";

export function mount(root: HTMLElement, store: StudioStore): void {
  const draw = () => {
    root.innerHTML = renderApp(deriveViewModel(store));
  };
  store.subscribe(draw);
  draw();

  root.addEventListener("input", (event) => {
    const target = event.target as HTMLElement;
    if (target.dataset.role === "editor-text") {
      store.setDraft(target.dataset.address ?? "", (target as HTMLTextAreaElement).value);
    }
  });

  root.addEventListener("click", (event) => {
    const target = (event.target as HTMLElement).closest("[data-action]") as HTMLElement | null;
    if (!target) return;
    const address = target.dataset.address ?? "";
    switch (target.dataset.action) {
      case "select-panel":
        store.selectPanel(target.dataset.panel ?? "title");
        break;
      case "select-scene":
        store.selectScene(Number(target.dataset.index ?? "0"));
        break;
      case "carousel-prev":
        store.moveCarousel(address, -1);
        break;
      case "carousel-next":
        store.moveCarousel(address, 1);
        break;
      case "generate":
      case "generate-upstream":
        void store.generate(address);
        break;
      case "continue":
        void store.continueSlot(address);
        break;
      case "open-editor":
        store.openEditor(address);
        break;
      case "close-editor":
        store.closeEditor(address);
        break;
      case "save-edit":
        void store.saveEdit(address);
        break;
      case "accept":
        void store.accept(address, Number(target.dataset.index ?? "0"));
        break;
      case "start-full":
        void store.startFullGeneration();
        break;
      case "load-export":
        void store.loadExport();
        break;
      case "download-export": {
        void store.loadExport().then(() => {
          if (store.exportText === null) return;
          const blob = new Blob([store.exportText], { type: "text/plain" });
          const link = document.createElement("a");
          link.href = URL.createObjectURL(blob);
          link.download = "script.txt";
          link.click();
          URL.revokeObjectURL(link.href);
        });
        break;
      }
      case "clear-error":
        store.clearError();
        break;
    }
  });
}

async function boot(): Promise<void> {
  const root = document.getElementById("app");
  if (!root) return;
  const api = new StudioApi();
  const params = new URLSearchParams(window.location.search);
  let sessionId = params.get("session");
  if (!sessionId) {
    const logLine = window.prompt("Log line for a new session:");
    if (!logLine) {
      root.innerHTML = "<p>Provide ?session=&lt;id&gt; or enter a log line.</p>";
      return;
    }
    const summary = await api.createSession(logLine, "medea");
    sessionId = summary.id;
    params.set("session", sessionId);
    window.history.replaceState(null, "", `?${params.toString()}`);
  }
  const store = new StudioStore(api);
  mount(root, store);
  await store.load(sessionId);
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  void boot();
}
