import { exportCsv, IncompleteSessionError } from "./csv.js";
import { ManifestError } from "./manifest.js";
import {
  renderBlockedAdvice,
  renderDoneScreen,
  renderErrorScreen,
  renderProgress,
  renderStartForm,
  renderTileView,
} from "./render.js";
import { Session } from "./session.js";
import { LocalStorageStore } from "./storage.js";
import { PATTERN_MAX, Score, STRENGTH_MAX } from "./types.js";

const app = document.getElementById("app") as HTMLElement;

let session: Session | null = null;
let pending: Partial<Score> = {};
let showDone = false;

function manifestUrl(): string {
  const params = new URLSearchParams(window.location.search);
  return params.get("manifest") ?? "manifest.json";
}

function draw(extra = ""): void {
  if (!session) return;
  if (showDone && session.isComplete()) {
    app.innerHTML = renderProgress(session) + renderDoneScreen(session);
  } else {
    const tile = session.current();
    const existing = session.scoreOf(tile.tileId);
    const shown = {
      strength: pending.strength ?? existing?.strength,
      pattern: pending.pattern ?? existing?.pattern,
    };
    app.innerHTML =
      renderProgress(session) +
      renderTileView(tile, shown, session.position, session.total) +
      extra;
  }
  wire();
}

function commitIfReady(): void {
  if (!session) return;
  if (pending.strength !== undefined && pending.pattern !== undefined) {
    session.recordScore(pending.strength, pending.pattern);
    pending = {};
    showDone = session.isComplete();
  }
  draw();
}

function choose(axis: "strength" | "pattern", value: number): void {
  pending = { ...pending, [axis]: value };
  commitIfReady();
}

function doExport(): void {
  if (!session) return;
  let csv: string;
  try {
    csv = exportCsv(session);
  } catch (err) {
    if (err instanceof IncompleteSessionError) {
      const go = window.confirm(
        `Session is incomplete (${err.message}). Export scored tiles only?`,
      );
      if (!go) return;
      csv = exportCsv(session, { allowPartial: true });
    } else {
      throw err;
    }
  }
  const blob = new Blob([csv], { type: "text/csv" });
  const link = document.createElement("a");
  link.href = URL.createObjectURL(blob);
  link.download = "annotations.csv";
  link.click();
  URL.revokeObjectURL(link.href);
}

function wire(): void {
  for (const button of app.querySelectorAll<HTMLButtonElement>("button.choice")) {
    button.addEventListener("click", () => {
      const axis = button.dataset.axis as "strength" | "pattern";
      choose(axis, Number(button.dataset.value));
    });
  }
  document.getElementById("back")?.addEventListener("click", () => {
    if (!session) return;
    showDone = false;
    session.back();
    pending = {};
    draw();
  });
  document.getElementById("next")?.addEventListener("click", () => {
    if (!session) return;
    if (session.forward()) {
      pending = {};
      draw();
    } else {
      draw(renderBlockedAdvice());
    }
  });
  document.getElementById("export")?.addEventListener("click", doExport);
}

function onKey(event: KeyboardEvent): void {
  if (!session || showDone) return;
  if (event.key === "Backspace") {
    session.back();
    pending = {};
    draw();
    event.preventDefault();
    return;
  }
  const digit = Number(event.key);
  if (!Number.isInteger(digit)) return;
  // first digit picks strength, the next one pattern
  if (pending.strength === undefined && digit <= STRENGTH_MAX) {
    choose("strength", digit);
  } else if (pending.strength !== undefined && digit <= PATTERN_MAX) {
    choose("pattern", digit);
  }
}

function startSession(evaluatorId: string, weight: number, manifest: unknown): void {
  const store = new LocalStorageStore(`cishtex-annotator/${evaluatorId}`);
  session = new Session(manifest, { evaluatorId, weight }, store);
  showDone = session.isComplete();
  pending = {};
  document.addEventListener("keydown", onKey);
  draw();
}

async function boot(): Promise<void> {
  let manifest: unknown;
  try {
    const response = await fetch(manifestUrl());
    if (!response.ok) {
      throw new ManifestError(`${manifestUrl()}: HTTP ${response.status}`);
    }
    manifest = await response.json();
  } catch (err) {
    app.innerHTML = renderErrorScreen(String(err));
    return;
  }
  app.innerHTML = renderStartForm();
  const form = document.getElementById("start-form") as HTMLFormElement;
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const evaluatorId =
      (document.getElementById("evaluator-id") as HTMLInputElement).value.trim();
    const weight = Number(
      (document.getElementById("evaluator-weight") as HTMLInputElement).value,
    );
    try {
      startSession(evaluatorId, weight, manifest);
    } catch (err) {
      app.innerHTML = renderErrorScreen(String(err));
    }
  });
}

void boot();
