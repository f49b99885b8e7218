/** Typed fetch wrappers over the artifact server's JSON endpoints.
 * The UI is served by the same process, so all paths are same-origin. */

import type {
  BackgroundPayload,
  ClustersResponse,
  DendrogramPayload,
  GridResponse,
  LabelsPayload,
  MetricsPayload,
  ScenarioDetail,
  ScenarioSummary,
} from "./types.js";

async function getJson<T>(path: string, signal?: AbortSignal): Promise<T> {
  const response = await fetch(path, { signal });
  if (!response.ok) {
    throw new Error(`GET ${path} failed: HTTP ${response.status}`);
  }
  return (await response.json()) as T;
}

export const api = {
  dendrogram: (): Promise<DendrogramPayload> => getJson("/api/dendrogram"),
  clusters: (threshold: number): Promise<ClustersResponse> =>
    getJson(`/api/clusters?threshold=${encodeURIComponent(threshold)}`),
  scenarios: (): Promise<ScenarioSummary[]> => getJson("/api/scenarios"),
  scenario: (id: string, signal?: AbortSignal): Promise<ScenarioDetail> =>
    getJson(`/api/scenario/${encodeURIComponent(id)}`, signal),
  grid: (id: string, channel: string, signal?: AbortSignal): Promise<GridResponse> =>
    getJson(`/api/grid/${encodeURIComponent(id)}/${encodeURIComponent(channel)}`, signal),
  metrics: (): Promise<MetricsPayload> => getJson("/api/metrics"),
  background: (): Promise<BackgroundPayload> => getJson("/api/background"),
  labels: (): Promise<LabelsPayload> => getJson("/api/labels"),
  saveLabels: async (labels: Record<string, string>): Promise<LabelsPayload> => {
    const response = await fetch("/api/labels", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ labels }),
    });
    if (!response.ok) {
      throw new Error(`POST /api/labels failed: HTTP ${response.status}`);
    }
    return (await response.json()) as LabelsPayload;
  },
};
