/** Application wiring: loads the artifacts, keeps ViewState in the URL
 * hash, and re-renders the pure views on every change. Threshold moves
 * recompute the cut client-side; only selections fetch new data. */

import { api } from "./api.js";
import { clustersAt, topHeight } from "./cut.js";
import { badgeReport, renderAccuracyCurve, renderClusterList, renderDendrogram, renderHeatmap, renderOverlay, renderScenarioList } from "./render.js";
import { DEFAULT_CHANNEL, formatHash, parseHash, type ViewState } from "./state.js";
import type {
  BackgroundPayload,
  ClusterGroup,
  DendrogramPayload,
  LabelsPayload,
  MetricsPayload,
  ScenarioDetail,
  ScenarioSummary,
} from "./types.js";

const CHANNELS = ["occupancy", "vx", "vy", "ax", "ay"];

interface AppData {
  dendrogram: DendrogramPayload;
  scenarios: Map<string, ScenarioSummary>;
  metrics: MetricsPayload;
  background: BackgroundPayload;
  labels: Record<string, string>;
  labelSource: string;
}

interface Selection {
  groups: ClusterGroup[];
  details: ScenarioDetail[];
}

const drafts: Record<string, string> = {};
let data: AppData | null = null;
let state: ViewState = { threshold: null, cluster: null, scenario: null, channel: DEFAULT_CHANNEL };
let current: Selection = { groups: [], details: [] };
let detailToken = 0;
let gridToken = 0;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) throw new Error(`missing element #${id}`);
  return node as T;
}

function banner(message: string | null): void {
  const box = el<HTMLDivElement>("banner");
  if (message === null) {
    box.hidden = true;
    box.textContent = "";
  } else {
    box.hidden = false;
    box.textContent = message;
  }
}

function defaultThreshold(d: DendrogramPayload, metrics: MetricsPayload): number {
  if (metrics.reports && metrics.reports.length > 0) {
    const best = metrics.reports.reduce((a, b) => (b.overall_accuracy > a.overall_accuracy ? b : a));
    return best.threshold;
  }
  return topHeight(d) * 0.7;
}

function writeHash(): void {
  history.replaceState(null, "", `${location.pathname}${formatHash(state)}`);
}

function threshold(): number {
  return state.threshold ?? 0;
}

function renderAll(): void {
  if (data === null) return;
  const d = data.dendrogram;
  const t = threshold();
  current.groups = clustersAt(d, t);
  if (state.cluster !== null && state.cluster >= current.groups.length) {
    state.cluster = null;
    state.scenario = null;
  }

  el("dendrogram").innerHTML = renderDendrogram(d, t);
  el("curve").innerHTML = renderAccuracyCurve(data.metrics, t);
  const report = badgeReport(data.metrics, t, current.groups.length);
  el("clusters").innerHTML = renderClusterList(current.groups, report, state.cluster);
  el("cut-info").textContent = `${current.groups.length} clusters at threshold ${t.toFixed(2)} (${d.linkage} linkage, ${d.n_samples} scenarios)`;

  const slider = el<HTMLInputElement>("threshold");
  if (document.activeElement !== slider) slider.value = String(t);
  const number = el<HTMLInputElement>("threshold-value");
  if (document.activeElement !== number) number.value = t.toFixed(2);

  renderDetailPanel();
}

function renderDetailPanel(): void {
  if (data === null) return;
  const group = state.cluster === null ? null : current.groups[state.cluster] ?? null;
  el("detail-title").textContent =
    group === null ? "select a cluster" : `cluster ${group.cluster_id} (${group.size} scenarios)`;
  if (group === null) {
    el("overlay").innerHTML = "";
    el("scenario-list").innerHTML = "";
    el("heatmap").innerHTML = "";
    return;
  }
  const summaries = group.scenario_ids
    .map((sid) => data!.scenarios.get(sid))
    .filter((s): s is ScenarioSummary => s !== undefined);
  el("scenario-list").innerHTML = renderScenarioList(summaries, data.labels, drafts, state.scenario);
  el("overlay").innerHTML = renderOverlay(current.details, data.background, state.scenario);
  if (state.scenario === null) {
    el("heatmap").innerHTML = "";
  }
}

async function loadClusterDetails(): Promise<void> {
  if (data === null || state.cluster === null) {
    current.details = [];
    renderDetailPanel();
    return;
  }
  const group = current.groups[state.cluster];
  if (group === undefined) return;
  const token = (detailToken += 1);
  try {
    const details = await Promise.all(group.scenario_ids.map((sid) => api.scenario(sid)));
    if (token !== detailToken) return;
    current.details = details;
    banner(null);
  } catch (error) {
    if (token !== detailToken) return;
    current.details = [];
    banner(`failed to load scenario details: ${String(error)}`);
  }
  renderDetailPanel();
}

async function loadGrid(): Promise<void> {
  if (data === null || state.scenario === null) return;
  const token = (gridToken += 1);
  try {
    const grid = await api.grid(state.scenario, state.channel);
    if (token !== gridToken) return;
    el("heatmap").innerHTML = renderHeatmap(grid);
    banner(null);
  } catch (error) {
    if (token !== gridToken) return;
    el("heatmap").innerHTML = "";
    banner(`failed to load grid channel '${state.channel}': ${String(error)}`);
  }
}

function setThreshold(value: number): void {
  if (!Number.isFinite(value) || value < 0) return;
  state.threshold = value;
  writeHash();
  renderAll();
}

function selectCluster(cluster: number | null): void {
  state.cluster = cluster;
  state.scenario = null;
  current.details = [];
  writeHash();
  renderAll();
  void loadClusterDetails();
}

function selectScenario(scenario: string | null): void {
  state.scenario = scenario;
  writeHash();
  renderDetailPanel();
  void loadGrid();
}

function applyDraft(ids: string[]): void {
  const input = el<HTMLInputElement>("label-input");
  const label = input.value.trim();
  if (label === "" || data === null) return;
  for (const sid of ids) {
    drafts[sid] = label;
  }
  el("label-status").textContent = `${Object.keys(drafts).length} draft label(s), not saved`;
  renderDetailPanel();
}

async function saveDrafts(): Promise<void> {
  if (data === null || Object.keys(drafts).length === 0) return;
  const status = el("label-status");
  status.textContent = "saving...";
  try {
    const saved: LabelsPayload = await api.saveLabels({ ...drafts });
    data.labels = saved.labels;
    for (const key of Object.keys(drafts)) delete drafts[key];
    status.textContent = `saved (${Object.keys(saved.labels).length} labels on server)`;
    banner(null);
  } catch (error) {
    // Drafts stay in memory so nothing the user typed is lost.
    status.textContent = "save failed, drafts kept";
    banner(`failed to save labels: ${String(error)}`);
  }
  renderDetailPanel();
}

function wireEvents(): void {
  el<HTMLInputElement>("threshold").addEventListener("input", (event) => {
    setThreshold(Number((event.target as HTMLInputElement).value));
  });
  el<HTMLInputElement>("threshold-value").addEventListener("change", (event) => {
    setThreshold(Number((event.target as HTMLInputElement).value));
  });
  el("clusters").addEventListener("click", (event) => {
    const item = (event.target as HTMLElement).closest<HTMLElement>("[data-cluster]");
    if (item?.dataset.cluster !== undefined) selectCluster(Number(item.dataset.cluster));
  });
  el("scenario-list").addEventListener("click", (event) => {
    const item = (event.target as HTMLElement).closest<HTMLElement>("[data-scenario]");
    if (item?.dataset.scenario !== undefined) selectScenario(item.dataset.scenario);
  });
  el("overlay").addEventListener("click", (event) => {
    const item = (event.target as HTMLElement).closest<HTMLElement>("[data-scenario]");
    if (item?.dataset.scenario !== undefined) selectScenario(item.dataset.scenario);
  });
  const channel = el<HTMLSelectElement>("channel");
  channel.innerHTML = CHANNELS.map(
    (name) => `<option value="${name}"${name === state.channel ? " selected" : ""}>${name}</option>`,
  ).join("");
  channel.addEventListener("change", () => {
    state.channel = channel.value;
    writeHash();
    void loadGrid();
  });
  el("label-scenario").addEventListener("click", () => {
    if (state.scenario !== null) applyDraft([state.scenario]);
  });
  el("label-cluster").addEventListener("click", () => {
    if (state.cluster !== null && current.groups[state.cluster] !== undefined) {
      applyDraft(current.groups[state.cluster].scenario_ids);
    }
  });
  el("label-save").addEventListener("click", () => {
    void saveDrafts();
  });
  window.addEventListener("hashchange", () => {
    state = parseHash(location.hash);
    if (data !== null && state.threshold === null) {
      state.threshold = defaultThreshold(data.dendrogram, data.metrics);
    }
    renderAll();
    void loadClusterDetails();
    void loadGrid();
  });
}

async function bootstrap(): Promise<void> {
  try {
    const [dendrogram, scenarioList, background, labelsPayload] = await Promise.all([
      api.dendrogram(),
      api.scenarios(),
      api.background(),
      api.labels(),
    ]);
    let metrics: MetricsPayload;
    try {
      metrics = await api.metrics();
    } catch {
      metrics = { reports: [] };
    }
    data = {
      dendrogram,
      scenarios: new Map(scenarioList.map((s) => [s.scenario_id, s])),
      metrics,
      background,
      labels: labelsPayload.labels,
      labelSource: labelsPayload.source,
    };
  } catch (error) {
    banner(`failed to load run artifacts: ${String(error)}`);
    return;
  }

  state = parseHash(location.hash);
  if (state.threshold === null) {
    state.threshold = defaultThreshold(data.dendrogram, data.metrics);
  }
  const slider = el<HTMLInputElement>("threshold");
  const top = topHeight(data.dendrogram);
  slider.max = String(top * 1.05);
  slider.step = String(Math.max(top / 500, 1e-6));
  el("meta").textContent = `${data.background.recording_id} / ${data.background.traffic_space_name}`;

  wireEvents();
  renderAll();
  if (state.cluster !== null) void loadClusterDetails();
  if (state.scenario !== null) void loadGrid();
}

void bootstrap();
