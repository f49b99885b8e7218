/** Client-side dendrogram cut, mirroring the server's semantics exactly:
 * merges with distance <= threshold join their components, and clusters
 * are numbered 0..k-1 in ascending order of their smallest leaf index.
 * The slider recolors through this module with no server round-trip; the
 * parity test keeps it honest against GET /api/clusters. */

import type { ClusterGroup, DendrogramPayload } from "./types.js";

/** Cluster id per leaf index. */
export function cutAssignments(d: DendrogramPayload, threshold: number): number[] {
  if (!Number.isFinite(threshold) || threshold < 0) {
    throw new Error("threshold must be a finite number >= 0");
  }
  const n = d.n_samples;
  const parent: number[] = Array.from({ length: 2 * n - 1 }, (_, i) => i);
  const find = (x: number): number => {
    while (parent[x] !== x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  d.merges.forEach(([left, right, distance], k) => {
    if (distance <= threshold) {
      const node = n + k;
      parent[find(left)] = node;
      parent[find(right)] = node;
    }
  });
  const roots = new Map<number, number>();
  const out = new Array<number>(n);
  for (let leaf = 0; leaf < n; leaf += 1) {
    const r = find(leaf);
    let c = roots.get(r);
    if (c === undefined) {
      c = roots.size;
      roots.set(r, c);
    }
    out[leaf] = c;
  }
  return out;
}

/** Grouped form, shaped like the server's clusters list (member ids
 * sorted lexicographically within each cluster). */
export function clustersAt(d: DendrogramPayload, threshold: number): ClusterGroup[] {
  const assignments = cutAssignments(d, threshold);
  const ids = d.row_ids ?? Array.from({ length: d.n_samples }, (_, i) => String(i));
  const groups = new Map<number, string[]>();
  assignments.forEach((c, leaf) => {
    const members = groups.get(c);
    if (members === undefined) {
      groups.set(c, [ids[leaf]]);
    } else {
      members.push(ids[leaf]);
    }
  });
  return [...groups.keys()]
    .sort((a, b) => a - b)
    .map((c) => {
      const scenarioIds = [...groups.get(c)!].sort();
      return { cluster_id: c, size: scenarioIds.length, scenario_ids: scenarioIds };
    });
}

/** Height of the last merge; 0 for a single-leaf dendrogram. */
export function topHeight(d: DendrogramPayload): number {
  return d.merges.length === 0 ? 0 : d.merges[d.merges.length - 1][2];
}
