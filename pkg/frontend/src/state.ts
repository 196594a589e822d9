/**
 * Explorer state and its pure transitions.
 *
 * Each method gets one column. Fetches are tracked with a per-column
 * sequence number so a stale response can never overwrite a newer one
 * (last write wins per column). Rows are stored exactly as the service
 * returned them.
 */

import type { Recommendation } from "./api.js";

export type ColumnStatus = "idle" | "loading" | "ready" | "error";

export interface ColumnState {
  method: string;
  status: ColumnStatus;
  seq: number; // sequence number of the newest request for this column
  rows: Recommendation[];
  error?: string;
}

export interface PendingComparison {
  header: string;
  followerA: string;
  followerB: string;
}

export interface ExplorerState {
  header: string | null;
  methods: string[];
  n: number;
  columns: Record<string, ColumnState>;
  pending: PendingComparison | null;
  picked: string | null; // first follower of a comparison in progress
  nextSeq: number;
}

export function createState(methods: string[] = [], n = 5): ExplorerState {
  const state: ExplorerState = {
    header: null,
    methods: [],
    n,
    columns: {},
    pending: null,
    picked: null,
    nextSeq: 1,
  };
  for (const method of methods) {
    addMethod(state, method);
  }
  return state;
}

export function addMethod(state: ExplorerState, method: string): void {
  if (state.methods.includes(method)) return;
  state.methods.push(method);
  state.columns[method] = { method, status: "idle", seq: 0, rows: [] };
}

export function removeMethod(state: ExplorerState, method: string): void {
  state.methods = state.methods.filter((m) => m !== method);
  delete state.columns[method];
}

/** Selecting a header invalidates every column and any comparison draft. */
export function selectHeader(state: ExplorerState, header: string): void {
  state.header = header;
  state.pending = null;
  state.picked = null;
  for (const method of state.methods) {
    const column = state.columns[method];
    if (column) {
      column.status = "idle";
      column.rows = [];
      column.error = undefined;
    }
  }
}

/** Mark a column loading and return the sequence number for this request. */
export function beginFetch(state: ExplorerState, method: string): number {
  const column = state.columns[method];
  if (!column) throw new Error(`no column for method ${method}`);
  const seq = state.nextSeq++;
  column.seq = seq;
  column.status = "loading";
  return seq;
}

export function applyRows(
  state: ExplorerState,
  method: string,
  seq: number,
  rows: Recommendation[],
): boolean {
  const column = state.columns[method];
  if (!column || column.seq !== seq) return false; // stale response dropped
  column.status = "ready";
  column.rows = rows;
  column.error = undefined;
  return true;
}

export function applyError(
  state: ExplorerState,
  method: string,
  seq: number,
  message: string,
): boolean {
  const column = state.columns[method];
  if (!column || column.seq !== seq) return false;
  column.status = "error";
  column.rows = []; // never show stale data next to an error
  column.error = message;
  return true;
}

/**
 * Click-to-compare: the first picked follower is remembered, the second
 * completes a pending comparison against the current header. Picking the
 * same follower twice cancels the pick.
 */
export function pickFollower(state: ExplorerState, followerId: string): void {
  if (!state.header) return;
  if (!isDisplayed(state, followerId)) return;
  if (state.picked === null) {
    state.picked = followerId;
    return;
  }
  if (state.picked === followerId) {
    state.picked = null;
    return;
  }
  state.pending = {
    header: state.header,
    followerA: state.picked,
    followerB: followerId,
  };
  state.picked = null;
}

export function clearPending(state: ExplorerState): void {
  state.pending = null;
}

export function isDisplayed(state: ExplorerState, followerId: string): boolean {
  return state.methods.some((method) =>
    (state.columns[method]?.rows ?? []).some((row) => row.font_id === followerId),
  );
}
