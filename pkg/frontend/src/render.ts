/** Pure view renderers. Every function returns an SVG or HTML string
 * from plain data, so the views are testable without a browser; app.ts
 * only injects the strings and wires events. */

import { cutAssignments } from "./cut.js";
import { layoutDendrogram, mergeClusters } from "./layout.js";
import type {
  BackgroundPayload,
  ClusterGroup,
  DendrogramPayload,
  GridResponse,
  MetricsPayload,
  ScenarioDetail,
  ScenarioSummary,
  ValidationReport,
} from "./types.js";

export const PALETTE = [
  "#4e79a7",
  "#f28e2b",
  "#59a14f",
  "#e15759",
  "#b07aa1",
  "#76b7b2",
  "#edc948",
  "#ff9da7",
  "#9c755f",
  "#86bcb6",
  "#d37295",
  "#a0cbe8",
];

const NEUTRAL = "#b5b5b5";

export function clusterColor(cluster: number): string {
  return cluster < 0 ? NEUTRAL : PALETTE[cluster % PALETTE.length];
}

export function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

const fmt = (value: number, digits = 2): string =>
  Number(value.toFixed(digits)).toString();

/** Dendrogram as SVG: one path per merge (exactly n-1), colored by the
 * cluster the cut assigns below the threshold, plus the threshold line. */
export function renderDendrogram(
  d: DendrogramPayload,
  threshold: number,
  width = 860,
  height = 380,
): string {
  const { elbows, top, order, leafX } = layoutDendrogram(d);
  const n = d.n_samples;
  const clusters = mergeClusters(d, threshold);
  const mx = 14;
  const myTop = 12;
  const myBottom = 22;
  const plotW = width - 2 * mx;
  const plotH = height - myTop - myBottom;
  const span = top > 0 ? top * 1.05 : 1;
  const X = (slot: number): number => mx + (n === 1 ? plotW / 2 : (slot / (n - 1)) * plotW);
  const Y = (dist: number): number => myTop + (1 - dist / span) * plotH;

  const parts: string[] = [];
  parts.push(
    `<svg class="dendrogram" viewBox="0 0 ${width} ${height}" xmlns="http://www.w3.org/2000/svg" role="img" aria-label="dendrogram">`,
  );
  for (const e of elbows) {
    const color = clusterColor(clusters[e.merge]);
    const path = `M ${fmt(X(e.x1))} ${fmt(Y(e.y1))} L ${fmt(X(e.x1))} ${fmt(Y(e.y))} L ${fmt(X(e.x2))} ${fmt(Y(e.y))} L ${fmt(X(e.x2))} ${fmt(Y(e.y2))}`;
    parts.push(
      `<path class="merge" data-merge="${e.merge}" d="${path}" fill="none" stroke="${color}" stroke-width="1.6"><title>merge ${e.merge}: h=${fmt(elbowHeight(e.merge, d), 4)}</title></path>`,
    );
  }
  const leafClusters = cutAssignments(d, threshold);
  for (const leaf of order) {
    parts.push(
      `<circle class="leaf" data-leaf="${leaf}" cx="${fmt(X(leafX[leaf]))}" cy="${fmt(Y(0))}" r="2.4" fill="${clusterColor(leafClusters[leaf])}"/>`,
    );
  }
  const ty = Y(Math.min(threshold, span));
  parts.push(
    `<line class="threshold-line" x1="0" x2="${width}" y1="${fmt(ty)}" y2="${fmt(ty)}" stroke="#d62728" stroke-width="1.2" stroke-dasharray="6 4"/>`,
  );
  parts.push(`</svg>`);
  return parts.join("");
}

function elbowHeight(merge: number, d: DendrogramPayload): number {
  return d.merges[merge][2];
}

/** Per-cluster accuracy badges for the active threshold: the metrics
 * report closest in threshold, used only when its cluster count matches
 * the current cut (ids then align by construction). */
export function badgeReport(
  metrics: MetricsPayload,
  threshold: number,
  nClusters: number,
): ValidationReport | null {
  if (!metrics.reports || metrics.reports.length === 0) return null;
  let best: ValidationReport | null = null;
  for (const report of metrics.reports) {
    if (best === null || Math.abs(report.threshold - threshold) < Math.abs(best.threshold - threshold)) {
      best = report;
    }
  }
  return best !== null && best.n_clusters === nClusters ? best : null;
}

export function renderClusterList(
  groups: ClusterGroup[],
  report: ValidationReport | null,
  selected: number | null,
): string {
  const byId = new Map(report?.per_cluster.map((c) => [c.cluster_id, c]) ?? []);
  const items = groups.map((g) => {
    const stats = byId.get(g.cluster_id);
    const badge =
      stats === undefined
        ? `<span class="badge badge-na" title="no validation report at this cut">n/a</span>`
        : `<span class="badge" style="background:${badgeColor(stats.accuracy)}" title="cluster accuracy vs ${esc(report!.label_source)}">${fmt(stats.accuracy, 2)}</span>`;
    const majority = stats?.majority_label ? `<span class="majority">${esc(stats.majority_label)}</span>` : "";
    const cls = g.cluster_id === selected ? "cluster selected" : "cluster";
    return (
      `<li class="${cls}" data-cluster="${g.cluster_id}">` +
      `<span class="swatch" style="background:${clusterColor(g.cluster_id)}"></span>` +
      `<span class="cluster-name">cluster ${g.cluster_id}</span>` +
      `<span class="count">${g.size}</span>${badge}${majority}</li>`
    );
  });
  return `<ul class="clusters">${items.join("")}</ul>`;
}

function badgeColor(accuracy: number): string {
  if (accuracy >= 0.9) return "#2e7d32";
  if (accuracy >= 0.7) return "#b58900";
  return "#c62828";
}

export function renderScenarioList(
  summaries: ScenarioSummary[],
  labels: Record<string, string>,
  drafts: Record<string, string>,
  selected: string | null,
): string {
  const items = summaries.map((s) => {
    const draft = drafts[s.scenario_id];
    const label = draft !== undefined ? draft : labels[s.scenario_id] ?? s.label;
    const labelHtml =
      label == null
        ? `<span class="label label-none">unlabeled</span>`
        : `<span class="label${draft !== undefined ? " label-draft" : ""}">${esc(label)}${draft !== undefined ? " *" : ""}</span>`;
    const cls = s.scenario_id === selected ? "scenario selected" : "scenario";
    return (
      `<li class="${cls}" data-scenario="${esc(s.scenario_id)}">` +
      `<span class="sid">${esc(s.scenario_id)}</span>` +
      `<span class="cat">${esc(s.category)}</span>` +
      `<span class="pet" title="post-encroachment time">${fmt(s.pet, 2)} s</span>` +
      `<span class="dist" title="minimum distance">${fmt(s.min_distance, 2)} m</span>` +
      `${labelHtml}</li>`
    );
  });
  return `<ul class="scenarios">${items.join("")}</ul>`;
}

/** World-frame trajectory overlay for the selected cluster's scenarios,
 * bounded by the recording extent; y is flipped into SVG coordinates. */
export function renderOverlay(
  details: ScenarioDetail[],
  background: BackgroundPayload,
  selected: string | null,
): string {
  const [xMin, xMax, yMin, yMax] = background.extent;
  const width = Math.max(xMax - xMin, 1);
  const height = Math.max(yMax - yMin, 1);
  const px = (x: number): string => fmt(x - xMin);
  const py = (y: number): string => fmt(yMax - y);
  const poly = (xs: number[], ys: number[]): string =>
    xs.map((x, i) => `${px(x)},${py(ys[i])}`).join(" ");

  const parts: string[] = [];
  parts.push(
    `<svg class="overlay" viewBox="0 0 ${fmt(width)} ${fmt(height)}" xmlns="http://www.w3.org/2000/svg" preserveAspectRatio="xMidYMid meet">`,
  );
  parts.push(
    `<rect class="ground" x="0" y="0" width="${fmt(width)}" height="${fmt(height)}"/>`,
  );
  for (const detail of details) {
    const dim = selected !== null && detail.scenario_id !== selected;
    parts.push(`<g class="scenario-tracks${dim ? " dim" : ""}" data-scenario="${esc(detail.scenario_id)}">`);
    for (const other of detail.others) {
      parts.push(
        `<polyline class="track other" points="${poly(other.x, other.y)}" vector-effect="non-scaling-stroke"/>`,
      );
    }
    parts.push(
      `<polyline class="track challenger" points="${poly(detail.challenger.x, detail.challenger.y)}" vector-effect="non-scaling-stroke"/>`,
    );
    parts.push(
      `<polyline class="track ego" points="${poly(detail.ego.x, detail.ego.y)}" vector-effect="non-scaling-stroke"/>`,
    );
    const egoIdx = detail.interaction.ego_frame_at_min - detail.ego.frames[0];
    if (egoIdx >= 0 && egoIdx < detail.ego.x.length) {
      parts.push(
        `<circle class="conflict" cx="${px(detail.ego.x[egoIdx])}" cy="${py(detail.ego.y[egoIdx])}" r="0.9"><title>${esc(detail.scenario_id)}: d=${fmt(detail.interaction.min_distance, 2)} m, PET=${fmt(detail.interaction.pet, 2)} s</title></circle>`,
      );
    }
    parts.push(`</g>`);
  }
  parts.push(`</svg>`);
  return parts.join("");
}

/** Grid-channel heatmap: one rect per cell. Occupancy uses the discrete
 * role palette; dynamic channels use a diverging scale around zero. */
export function renderHeatmap(grid: GridResponse): string {
  const cell = 10;
  const width = grid.width * cell;
  const height = grid.height * cell;
  const occupancy = grid.channel === "occupancy";
  let maxAbs = 0;
  if (!occupancy) {
    for (const row of grid.values) {
      for (const value of row) {
        maxAbs = Math.max(maxAbs, Math.abs(value));
      }
    }
  }
  const parts: string[] = [];
  parts.push(
    `<svg class="heatmap" viewBox="0 0 ${width} ${height}" xmlns="http://www.w3.org/2000/svg">`,
  );
  grid.values.forEach((row, r) => {
    row.forEach((value, c) => {
      if (value === 0) return;
      const fill = occupancy ? occupancyColor(value) : divergingColor(value, maxAbs);
      parts.push(
        `<rect class="cell" x="${c * cell}" y="${r * cell}" width="${cell}" height="${cell}" fill="${fill}"><title>row ${r}, col ${c}: ${fmt(value, 4)}</title></rect>`,
      );
    });
  });
  parts.push(`</svg>`);
  return parts.join("");
}

function occupancyColor(value: number): string {
  if (value >= 1.0) return "#1f77b4";
  if (value >= 0.75) return "#ff7f0e";
  return "#9e9e9e";
}

function divergingColor(value: number, maxAbs: number): string {
  const t = maxAbs > 0 ? Math.max(-1, Math.min(1, value / maxAbs)) : 0;
  const strength = Math.round(Math.abs(t) * 200);
  return t >= 0
    ? `rgb(${255 - strength},${255 - Math.round(strength * 0.68)},255)`
    : `rgb(255,${255 - Math.round(strength * 0.68)},${255 - strength})`;
}

/** Accuracy and cluster count over the threshold sweep, with a marker
 * at the active threshold. */
export function renderAccuracyCurve(
  metrics: MetricsPayload,
  threshold: number,
  width = 420,
  height = 180,
): string {
  const reports = metrics.reports;
  if (!reports || reports.length === 0) {
    return `<svg class="curve" viewBox="0 0 ${width} ${height}"><text x="12" y="24" class="note">no validation metrics (no label set)</text></svg>`;
  }
  const mx = 30;
  const my = 14;
  const plotW = width - 2 * mx;
  const plotH = height - 2 * my;
  const tMax = Math.max(...reports.map((r) => r.threshold), threshold, 1e-12);
  const kMax = Math.max(...reports.map((r) => r.n_clusters), 1);
  const X = (t: number): string => fmt(mx + (t / tMax) * plotW);
  const accY = (a: number): string => fmt(my + (1 - a) * plotH);
  const cntY = (k: number): string => fmt(my + (1 - k / kMax) * plotH);

  const accPoints = reports.map((r) => `${X(r.threshold)},${accY(r.overall_accuracy)}`).join(" ");
  const cntPoints = reports.map((r) => `${X(r.threshold)},${cntY(r.n_clusters)}`).join(" ");
  const marker = X(Math.min(threshold, tMax));
  const best = reports.reduce((a, b) => (b.overall_accuracy > a.overall_accuracy ? b : a));
  return (
    `<svg class="curve" viewBox="0 0 ${width} ${height}" xmlns="http://www.w3.org/2000/svg">` +
    `<line class="axis" x1="${mx}" y1="${my + plotH}" x2="${mx + plotW}" y2="${my + plotH}"/>` +
    `<line class="axis" x1="${mx}" y1="${my}" x2="${mx}" y2="${my + plotH}"/>` +
    `<polyline class="count-line" points="${cntPoints}" fill="none"/>` +
    `<polyline class="accuracy-line" points="${accPoints}" fill="none"/>` +
    `<circle class="best" cx="${X(best.threshold)}" cy="${accY(best.overall_accuracy)}" r="3"><title>best: ${fmt(best.overall_accuracy, 3)} at t=${fmt(best.threshold, 2)} (${best.n_clusters} clusters)</title></circle>` +
    `<line class="threshold-line" x1="${marker}" y1="${my}" x2="${marker}" y2="${my + plotH}"/>` +
    `<text class="tick" x="${mx}" y="${height - 2}">0</text>` +
    `<text class="tick" x="${mx + plotW - 18}" y="${height - 2}">${fmt(tMax, 1)}</text>` +
    `<text class="tick" x="2" y="${my + 8}">1.0</text>` +
    `<text class="tick" x="2" y="${my + plotH}">0.0</text>` +
    `</svg>`
  );
}
