// Browser console wiring: control panel -> API -> rendered views.
// All statistics arrive from the service; this file only moves state.

import { ApiError, Client } from "./api.js";
import { ColumnInfo, DatasetInfo, ProgressEvent, SweepResult } from "./types.js";
import { pct } from "./format.js";
import { comparisonSubtitle, renderComparison } from "./views/comparison.js";
import { renderMarginal } from "./views/marginal.js";
import { renderRecommendations } from "./views/recommendations.js";
import { PanelState, pushState, readState } from "./urlstate.js";

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

const state: PanelState = readState();
const client = new Client(state.api ?? "http://127.0.0.1:8000");
let catalog: DatasetInfo | null = null;
let lastSweep: SweepResult | null = null;

function syncUrl(): void {
  state.api = client.baseUrl;
  pushState(state);
}

function note(text: string, isError = false): void {
  const el = $("status-line");
  el.textContent = text;
  el.className = isError ? "status error" : "status";
}

function describeError(err: unknown): string {
  if (err instanceof ApiError) return `${err.code}: ${err.message}`;
  return String(err);
}

// ---- dataset upload and column catalog -----------------------------------

async function uploadSelectedFile(): Promise<void> {
  const input = $<HTMLInputElement>("upload-input");
  const file = input.files?.[0];
  if (!file) {
    note("choose a CSV file first", true);
    return;
  }
  note(`uploading ${file.name} ...`);
  try {
    const info = await client.uploadCsv(await file.text());
    state.dataset = info.dataset_id;
    await loadCatalog();
    note(`loaded ${file.name}: ${info.n_rows} rows`);
  } catch (err) {
    note(describeError(err), true);
  }
}

async function loadCatalog(): Promise<void> {
  if (!state.dataset) return;
  catalog = await client.columns(state.dataset);
  const columnSelect = $<HTMLSelectElement>("column-select");
  const metricSelect = $<HTMLSelectElement>("metric-select");
  columnSelect.innerHTML = "";
  metricSelect.innerHTML = "";
  for (const col of catalog.columns) {
    columnSelect.add(new Option(col.name, col.name,
                                undefined, col.name === state.column));
    if (col.kind === "numeric") {
      metricSelect.add(new Option(col.name, col.name,
                                  undefined, col.name === state.metric));
    }
  }
  refreshValueOptions();
  syncUrl();
}

function selectedColumn(): ColumnInfo | undefined {
  return catalog?.columns.find(
    (c) => c.name === $<HTMLSelectElement>("column-select").value);
}

function refreshValueOptions(): void {
  const col = selectedColumn();
  const valueSelect = $<HTMLSelectElement>("value-select");
  valueSelect.innerHTML = "";
  if (!col) return;
  for (const v of col.values) {
    const label = `${v.value} (${pct(v.fraction)})`;
    valueSelect.add(new Option(label, v.value, undefined,
                               v.value === state.value));
  }
  onValuePicked();
}

function onValuePicked(): void {
  const col = selectedColumn();
  const picked = $<HTMLSelectElement>("value-select").value;
  const entry = col?.values.find((v) => v.value === picked);
  if (entry) {
    const slider = $<HTMLInputElement>("fraction-slider");
    if (state.fraction === undefined) slider.value = String(entry.fraction);
    $("fraction-label").textContent = pct(Number(slider.value));
  }
}

function collectScenario(): PanelState {
  state.column = $<HTMLSelectElement>("column-select").value;
  state.value = $<HTMLSelectElement>("value-select").value;
  state.fraction = Number($<HTMLInputElement>("fraction-slider").value);
  state.metric = $<HTMLSelectElement>("metric-select").value;
  state.operator = $<HTMLSelectElement>("operator-select").value;
  state.direction = $<HTMLSelectElement>("direction-select").value;
  state.smoothing = Number($<HTMLInputElement>("smoothing-input").value) || 1;
  syncUrl();
  return state;
}

// ---- views ----------------------------------------------------------------

async function runWhatif(): Promise<void> {
  const s = collectScenario();
  if (!s.dataset) return note("upload a dataset first", true);
  const seq = client.nextSeq();
  note("evaluating scenario ...");
  try {
    const result = await client.whatif(s.dataset, {
      column: s.column, value: s.value, fraction: s.fraction,
      metric: s.metric, operator: s.operator, direction: s.direction,
      smoothing: s.smoothing,
      baseline_mode: $<HTMLSelectElement>("baseline-mode").value,
    });
    if (!client.isCurrent(seq)) return; // a newer request superseded this one
    const range: [number, number] | null =
      s.rangeLo !== undefined && s.rangeHi !== undefined
        ? [s.rangeLo, s.rangeHi] : null;
    $("comparison-view").innerHTML =
      `<p class="subtitle">${comparisonSubtitle(result.current_fraction,
        result.scenario.fraction, result.scenario.value)}</p>` +
      renderComparison(result.report, {
        metricLabel: s.metric, smoothing: s.smoothing, range,
      });
    wireZoomLinks();
    note("scenario evaluated");
  } catch (err) {
    if (client.isCurrent(seq)) note(describeError(err), true);
  }
}

function wireZoomLinks(): void {
  document.querySelectorAll<HTMLAnchorElement>(".zoom-link").forEach((a) => {
    a.addEventListener("click", (ev) => {
      ev.preventDefault();
      state.rangeLo = Number(a.dataset.lo);
      state.rangeHi = Number(a.dataset.hi);
      void runWhatif();
    });
  });
}

async function runMargins(column?: string, value?: string): Promise<void> {
  const s = collectScenario();
  if (!s.dataset) return note("upload a dataset first", true);
  const seq = client.nextSeq();
  note("sweeping fractions ...");
  try {
    const result = await client.margins(s.dataset, {
      column: column ?? s.column, value: value ?? s.value,
      metric: s.metric, operator: s.operator, direction: s.direction,
    });
    if (!client.isCurrent(seq)) return;
    $("marginal-view").innerHTML = renderMarginal(result);
    note("marginal curve ready");
  } catch (err) {
    if (client.isCurrent(seq)) note(describeError(err), true);
  }
}

function showProgress(events: ProgressEvent[]): void {
  const last = events[events.length - 1];
  if (last) {
    note(`sweep ${last.index + 1}/${last.total}: ${last.scenario} ` +
      `(${last.status})`);
  }
}

async function runSweep(): Promise<void> {
  const s = collectScenario();
  if (!s.dataset) return note("upload a dataset first", true);
  note("starting sweep ...");
  try {
    const result = await client.runSweep(s.dataset, {
      metric: s.metric, operator: s.operator, direction: s.direction,
    }, showProgress);
    lastSweep = result;
    renderSweep(1);
    note(`sweep finished: ${result.attempted} scenarios ranked`);
  } catch (err) {
    note(describeError(err), true);
  }
}

function renderSweep(selectedRank: number): void {
  if (!lastSweep) return;
  $("recommendations-view").innerHTML = renderRecommendations(
    lastSweep.recommendations, lastSweep.skipped, selectedRank,
    state.metric ?? "metric");
  const select = document.getElementById("rec-select") as
    HTMLSelectElement | null;
  select?.addEventListener("change",
                           () => renderSweep(Number(select.value)));
  document.querySelectorAll<HTMLAnchorElement>(".margins-link")
    .forEach((a) => a.addEventListener("click", (ev) => {
      ev.preventDefault();
      const params = new URLSearchParams(a.hash.split("?")[1] ?? "");
      void runMargins(params.get("column") ?? undefined,
                      params.get("value") ?? undefined);
    }));
}

// ---- boot -----------------------------------------------------------------

export function boot(): void {
  $("upload-btn").addEventListener("click", () => void uploadSelectedFile());
  $("column-select").addEventListener("change", () => {
    state.value = undefined;
    refreshValueOptions();
  });
  $("value-select").addEventListener("change", () => {
    state.fraction = undefined;
    onValuePicked();
  });
  $<HTMLInputElement>("fraction-slider").addEventListener("input", () => {
    $("fraction-label").textContent =
      pct(Number($<HTMLInputElement>("fraction-slider").value));
  });
  $("run-whatif").addEventListener("click", () => {
    state.rangeLo = undefined;
    state.rangeHi = undefined;
    void runWhatif();
  });
  $("run-margins").addEventListener("click", () => void runMargins());
  $("run-sweep").addEventListener("click", () => void runSweep());
  $<HTMLInputElement>("smoothing-input").addEventListener("change",
    () => void runWhatif());
  if (state.dataset) {
    loadCatalog().catch((err) => note(describeError(err), true));
  }
}

if (typeof document !== "undefined" && document.getElementById("upload-btn")) {
  boot();
}
