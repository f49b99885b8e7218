/** Core correctness property of the UI: the client-side cut produces
 * exactly the partition the server returns, for any threshold. */

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { clustersAt, cutAssignments, topHeight } from "../src/cut.js";
import { renderDendrogram } from "../src/render.js";
import type { ClustersResponse, DendrogramPayload } from "../src/types.js";
import { buildRun, getJson, mulberry32, removeRun, startServer, type RunningServer } from "./helpers.js";

let runDir: string;
let server: RunningServer;
let dendrogram: DendrogramPayload;

beforeAll(async () => {
  runDir = buildRun();
  server = await startServer(runDir);
  dendrogram = await getJson<DendrogramPayload>(server.base, "/api/dendrogram");
});

afterAll(() => {
  server?.stop();
  if (runDir) removeRun(runDir);
});

describe("client cut parity with the server", () => {
  it("matches GET /api/clusters for 20 random thresholds exactly", async () => {
    const rand = mulberry32(17);
    const top = topHeight(dendrogram);
    expect(top).toBeGreaterThan(0);
    for (let trial = 0; trial < 20; trial += 1) {
      const threshold = rand() * top * 1.1;
      const fromServer = await getJson<ClustersResponse>(
        server.base,
        `/api/clusters?threshold=${threshold}`,
      );
      const mine = clustersAt(dendrogram, threshold);
      expect(mine.length).toBe(fromServer.n_clusters);
      expect(mine).toEqual(fromServer.clusters);
    }
  });

  it("gives all singletons at threshold 0 and one cluster above the root", async () => {
    const zero = clustersAt(dendrogram, 0);
    expect(zero.length).toBe(dendrogram.n_samples);
    for (const group of zero) expect(group.size).toBe(1);
    const zeroServer = await getJson<ClustersResponse>(server.base, "/api/clusters?threshold=0");
    expect(zero).toEqual(zeroServer.clusters);

    const huge = topHeight(dendrogram) * 10;
    const one = clustersAt(dendrogram, huge);
    expect(one.length).toBe(1);
    expect(one[0].size).toBe(dendrogram.n_samples);
    const oneServer = await getJson<ClustersResponse>(server.base, `/api/clusters?threshold=${huge}`);
    expect(one).toEqual(oneServer.clusters);
  });

  it("numbers clusters by their smallest leaf index", () => {
    const assignments = cutAssignments(dendrogram, topHeight(dendrogram) / 2);
    const seen = new Set<number>();
    for (const cluster of assignments) {
      // Walking leaves in index order, every new cluster id is the next integer.
      if (!seen.has(cluster)) {
        expect(cluster).toBe(seen.size);
        seen.add(cluster);
      }
    }
  });

  it("renders exactly n-1 merges in the dendrogram view", () => {
    const svg = renderDendrogram(dendrogram, topHeight(dendrogram) / 2);
    const mergePaths = svg.match(/class="merge"/g) ?? [];
    expect(mergePaths.length).toBe(dendrogram.n_samples - 1);
    expect(svg).toContain('class="threshold-line"');
  });
});
