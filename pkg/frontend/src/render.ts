/**
 * Pure HTML rendering. Columns appear in the order methods were selected;
 * rows appear exactly in service order with scores printed verbatim
 * (String(score) round-trips the JSON number unchanged). No DOM access
 * here, so every piece is unit-testable.
 */

import { familyName } from "./family.js";
import type { ExplorerState } from "./state.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderBanner(kind: "error" | "info", message: string): string {
  return `<div class="banner banner-${kind}">${escapeHtml(message)}</div>`;
}

export function renderColumns(state: ExplorerState): string {
  if (state.methods.length === 0) {
    return renderBanner("info", "Select at least one method to compare.");
  }
  if (!state.header) {
    return renderBanner("info", "Pick a header font to see recommendations.");
  }
  const columns = state.methods
    .map((method) => renderColumn(state, method))
    .join("");
  return `<div class="columns">${columns}</div>`;
}

function renderColumn(state: ExplorerState, method: string): string {
  const column = state.columns[method];
  if (!column) return "";
  let body: string;
  switch (column.status) {
    case "idle":
    case "loading":
      body = `<div class="column-loading">loading…</div>`;
      break;
    case "error":
      body = `<div class="column-error">${escapeHtml(column.error ?? "request failed")}</div>`;
      break;
    case "ready":
      body = column.rows
        .map((row, index) => renderRow(state, method, index, row.font_id, row.score))
        .join("");
      if (body === "") body = `<div class="column-empty">no recommendations</div>`;
      break;
  }
  return (
    `<section class="column" data-method="${escapeHtml(method)}">` +
    `<h2>${escapeHtml(method)}</h2>${body}</section>`
  );
}

export function renderRow(
  state: ExplorerState,
  method: string,
  index: number,
  fontId: string,
  score: number,
): string {
  const family = familyName(fontId);
  const picked = state.picked === fontId ? " picked" : "";
  return (
    `<div class="row${picked}" data-method="${escapeHtml(method)}" data-rank="${index + 1}">` +
    `<button class="pick" data-font="${escapeHtml(fontId)}" title="pick for comparison">⚖</button>` +
    `<span class="name" data-font="${escapeHtml(fontId)}" data-family="${escapeHtml(family)}"` +
    ` style="font-family: &quot;${escapeHtml(family)}&quot;, sans-serif">${escapeHtml(fontId)}</span>` +
    `<span class="score">${String(score)}</span>` +
    `</div>`
  );
}

export function renderPending(state: ExplorerState): string {
  if (state.picked) {
    return renderBanner("info", `Picked ${state.picked}; pick a second follower to compare.`);
  }
  if (!state.pending) return "";
  const { followerA, followerB } = state.pending;
  return (
    `<div class="pending" data-a="${escapeHtml(followerA)}" data-b="${escapeHtml(followerB)}">` +
    `<span>Which pairs better with ${escapeHtml(state.header ?? "")}?</span>` +
    `<button class="choose" data-choice="a">${escapeHtml(followerA)}</button>` +
    `<button class="choose" data-choice="b">${escapeHtml(followerB)}</button>` +
    `<button class="cancel">cancel</button>` +
    `</div>`
  );
}
