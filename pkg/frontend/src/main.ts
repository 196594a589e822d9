/**
 * DOM wiring: everything stateful lives in state.ts / outbox.ts, everything
 * visual in render.ts; this file only connects them to the page.
 */

import { ApiClient } from "./api.js";
import { ComparisonOutbox } from "./outbox.js";
import {
  addMethod,
  applyError,
  applyRows,
  beginFetch,
  clearPending,
  createState,
  pickFollower,
  removeMethod,
  selectHeader,
} from "./state.js";
import { renderBanner, renderColumns, renderPending } from "./render.js";

const ALL_METHODS = ["dsknn", "asml", "sml", "ml", "popularity", "sknn", "family", "consim"];
const DEFAULT_METHODS = ["dsknn", "popularity", "sknn"];

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function baseUrl(): string {
  const fromQuery = new URLSearchParams(location.search).get("service");
  return (
    fromQuery ??
    localStorage.getItem("fontpair.service") ??
    "http://127.0.0.1:8765"
  );
}

async function boot(): Promise<void> {
  const serviceInput = el<HTMLInputElement>("service-url");
  const headerSelect = el<HTMLSelectElement>("header-select");
  const nInput = el<HTMLInputElement>("n-input");
  const methodsBox = el<HTMLDivElement>("methods");
  const columnsBox = el<HTMLDivElement>("columns");
  const pendingBox = el<HTMLDivElement>("pending");
  const statusBox = el<HTMLDivElement>("status");

  serviceInput.value = baseUrl();
  let api = new ApiClient(serviceInput.value);
  const state = createState(DEFAULT_METHODS, Number(nInput.value) || 5);
  const outbox = new ComparisonOutbox((payload) => api.postComparison(payload));

  const flushSoon = () => {
    void outbox.flush().then(() => updateStatus());
  };
  setInterval(flushSoon, 3000);
  window.addEventListener("online", flushSoon);

  function updateStatus(): void {
    statusBox.innerHTML =
      outbox.pendingCount > 0
        ? renderBanner("info", `${outbox.pendingCount} comparison(s) queued for delivery`)
        : "";
  }

  function paint(): void {
    columnsBox.innerHTML = renderColumns(state);
    pendingBox.innerHTML = renderPending(state);
    markFallbackFonts();
    updateStatus();
  }

  function markFallbackFonts(): void {
    if (!("fonts" in document)) return;
    for (const name of columnsBox.querySelectorAll<HTMLElement>(".name[data-family]")) {
      const family = name.dataset.family ?? "";
      let available = false;
      try {
        available = document.fonts.check(`12px "${family}"`);
      } catch {
        available = false;
      }
      if (!available && !name.querySelector(".fallback-badge")) {
        const badge = document.createElement("sup");
        badge.className = "fallback-badge";
        badge.title = "rendered in a fallback face";
        badge.textContent = "fallback";
        name.append(badge);
      }
    }
  }

  function refreshColumns(): void {
    const header = state.header;
    if (!header) {
      paint();
      return;
    }
    for (const method of state.methods) {
      const seq = beginFetch(state, method);
      api
        .recommend(header, method, state.n)
        .then((rows) => {
          if (applyRows(state, method, seq, rows)) paint();
        })
        .catch((err) => {
          if (applyError(state, method, seq, String(err.message ?? err))) paint();
        });
    }
    paint();
  }

  async function loadFonts(): Promise<void> {
    try {
      const fonts = await api.fonts("header");
      headerSelect.innerHTML = fonts
        .map((f) => `<option value="${f}">${f}</option>`)
        .join("");
      columnsBox.innerHTML = "";
      if (fonts.length > 0 && fonts[0]) {
        selectHeader(state, fonts[0]);
        refreshColumns();
      }
    } catch (err) {
      columnsBox.innerHTML = renderBanner(
        "error",
        `Cannot reach the service at ${api.baseUrl}: ${String((err as Error).message)}`,
      );
    }
  }

  methodsBox.innerHTML = ALL_METHODS.map(
    (m) =>
      `<label><input type="checkbox" value="${m}" ${
        DEFAULT_METHODS.includes(m) ? "checked" : ""
      }>${m}</label>`,
  ).join("");

  serviceInput.addEventListener("change", () => {
    localStorage.setItem("fontpair.service", serviceInput.value);
    api = new ApiClient(serviceInput.value);
    void loadFonts();
  });
  headerSelect.addEventListener("change", () => {
    selectHeader(state, headerSelect.value);
    refreshColumns();
  });
  nInput.addEventListener("change", () => {
    state.n = Math.max(1, Number(nInput.value) || 5);
    refreshColumns();
  });
  methodsBox.addEventListener("change", (event) => {
    const box = event.target as HTMLInputElement;
    if (box.checked) addMethod(state, box.value);
    else removeMethod(state, box.value);
    refreshColumns();
  });
  columnsBox.addEventListener("click", (event) => {
    const button = (event.target as HTMLElement).closest<HTMLElement>("button.pick");
    if (!button) return;
    pickFollower(state, button.dataset.font ?? "");
    paint();
  });
  pendingBox.addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    if (target.matches("button.cancel")) {
      clearPending(state);
      paint();
      return;
    }
    const choiceButton = target.closest<HTMLElement>("button.choose");
    if (!choiceButton || !state.pending) return;
    const { header, followerA, followerB } = state.pending;
    outbox.submit({
      header,
      follower_a: followerA,
      follower_b: followerB,
      choice: choiceButton.dataset.choice === "a" ? "a" : "b",
    });
    clearPending(state);
    paint();
    flushSoon();
  });

  await loadFonts();
}

void boot();
