import { describe, expect, it } from "vitest";

import { familyName } from "../src/family.js";
import { renderColumns, renderPending } from "../src/render.js";
import {
  applyError,
  applyRows,
  beginFetch,
  createState,
  pickFollower,
  selectHeader,
} from "../src/state.js";

function readyState(rows = [
  { font_id: "Beta", score: 0.9321 },
  { font_id: "Gamma-Bold", score: -0.125 },
]) {
  const state = createState(["dsknn", "popularity"]);
  selectHeader(state, "Alpha");
  applyRows(state, "dsknn", beginFetch(state, "dsknn"), rows);
  applyRows(state, "popularity", beginFetch(state, "popularity"), [...rows].reverse());
  return state;
}

describe("rendering", () => {
  it("renders one column per method, in selection order", () => {
    const html = renderColumns(readyState());
    const positions = ["dsknn", "popularity"].map((m) =>
      html.indexOf(`data-method="${m}"`),
    );
    expect(positions.every((p) => p >= 0)).toBe(true);
    expect(positions[0]).toBeLessThan(positions[1]!);
  });

  it("renders rows in service order without reordering", () => {
    const html = renderColumns(readyState());
    const column = html.slice(
      html.indexOf('data-method="dsknn"'),
      html.indexOf('data-method="popularity"'),
    );
    expect(column.indexOf("Beta")).toBeLessThan(column.indexOf("Gamma-Bold"));
    // the popularity column was served reversed and must stay reversed
    const popColumn = html.slice(html.indexOf('data-method="popularity"'));
    expect(popColumn.indexOf("Gamma-Bold")).toBeLessThan(popColumn.indexOf("Beta"));
  });

  it("prints scores verbatim", () => {
    const html = renderColumns(readyState());
    expect(html).toContain('<span class="score">0.9321</span>');
    expect(html).toContain('<span class="score">-0.125</span>');
  });

  it("prompts when no method is selected", () => {
    const state = createState([]);
    selectHeader(state, "Alpha");
    expect(renderColumns(state)).toContain("Select at least one method");
  });

  it("shows an error banner per failed column and no stale rows", () => {
    const state = readyState();
    applyError(state, "dsknn", beginFetch(state, "dsknn"), "service unreachable");
    const html = renderColumns(state);
    const column = html.slice(
      html.indexOf('data-method="dsknn"'),
      html.indexOf('data-method="popularity"'),
    );
    expect(column).toContain("service unreachable");
    expect(column).not.toContain("0.9321");
  });

  it("applies the parsed family to the row style with the raw id as text", () => {
    const html = renderColumns(readyState());
    expect(html).toContain('data-family="Gamma"');
    expect(html).toContain("font-family: &quot;Gamma&quot;, sans-serif");
    expect(html).toContain(">Gamma-Bold<");
  });

  it("escapes hostile font ids", () => {
    const rows = [{ font_id: '<script>alert("x")</script>', score: 1 }];
    const html = renderColumns(readyState(rows));
    expect(html).not.toContain("<script>alert");
  });

  it("renders the pending comparison with both choices", () => {
    const state = readyState();
    pickFollower(state, "Beta");
    pickFollower(state, "Gamma-Bold");
    const html = renderPending(state);
    expect(html).toContain('data-a="Beta"');
    expect(html).toContain('data-b="Gamma-Bold"');
    expect(html).toContain('data-choice="a"');
    expect(html).toContain('data-choice="b"');
  });
});

describe("familyName", () => {
  it.each([
    ["Helvetica-Bold", "Helvetica"],
    ["HelveticaBold", "Helvetica"],
    ["Gamma-Bold", "Gamma"],
    ["TimesNewRomanPSMT", "TimesNewRomanPSMT"],
    ["Black-Ops", "Black"],
  ])("parses %s -> %s", (fontId, family) => {
    expect(familyName(fontId)).toBe(family);
  });
});
