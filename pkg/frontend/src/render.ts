import { Session } from "./session.js";
import {
  PATTERN_LABELS,
  Score,
  SessionTile,
  STRENGTH_LABELS,
} from "./types.js";

// Pure HTML-string views so the page content is testable headlessly.

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderProgress(session: Session): string {
  return `<div class="progress">${session.scoredCount} / ${session.total}</div>`;
}

function renderAxis(
  axis: "strength" | "pattern",
  labels: readonly string[],
  selected: number | null,
): string {
  const buttons = labels
    .map((label, value) => {
      const cls = selected === value ? "choice selected" : "choice";
      return (
        `<button class="${cls}" data-axis="${axis}" data-value="${value}">` +
        `${value} · ${label}</button>`
      );
    })
    .join("");
  return `<div class="axis" id="axis-${axis}"><span class="axis-name">${axis}</span>${buttons}</div>`;
}

export function renderTileView(
  tile: SessionTile,
  pending: Partial<Score>,
  position: number,
  total: number,
): string {
  return [
    `<div class="tile-header">tile ${position + 1} of ${total}</div>`,
    `<img class="tile-image" src="${escapeHtml(tile.imagePath)}" alt="tile ${tile.tileId}">`,
    renderAxis("strength", STRENGTH_LABELS, pending.strength ?? null),
    renderAxis("pattern", PATTERN_LABELS, pending.pattern ?? null),
    `<div class="nav">` +
      `<button id="back">&larr; back</button>` +
      `<button id="next">next &rarr;</button>` +
      `<button id="export">export CSV</button>` +
      `</div>`,
    `<div class="hint">keys: first digit 0-3 sets strength, second 0-2 sets pattern; backspace goes back</div>`,
  ].join("\n");
}

export function renderBlockedAdvice(): string {
  return `<div class="blocked">choose both strength and pattern before advancing</div>`;
}

export function renderDoneScreen(session: Session): string {
  return [
    `<div class="done">all ${session.total} tiles scored</div>`,
    `<div class="nav">` +
      `<button id="back">&larr; review</button>` +
      `<button id="export">export CSV</button>` +
      `</div>`,
  ].join("\n");
}

export function renderErrorScreen(message: string): string {
  return `<div class="fatal">cannot start session: ${escapeHtml(message)}</div>`;
}

export function renderStartForm(): string {
  return [
    `<form id="start-form">`,
    `<label>evaluator id <input id="evaluator-id" required></label>`,
    `<label>weight <input id="evaluator-weight" type="number" min="1" step="1" value="1" required></label>`,
    `<button type="submit">start grading</button>`,
    `</form>`,
  ].join("\n");
}
