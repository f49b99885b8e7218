/** Pure dendrogram geometry: leaf ordering and one elbow per merge, in
 * unit coordinates (leaf slots on x, merge distance on y). Rendering
 * maps these to pixels; tests assert the invariants on the geometry. */

import { cutAssignments } from "./cut.js";
import type { DendrogramPayload } from "./types.js";

export interface Elbow {
  /** Index into merges; the elbow joins the two child nodes. */
  merge: number;
  x1: number;
  y1: number;
  x2: number;
  y2: number;
  /** Merge height; the horizontal bar sits here. */
  y: number;
  /** Midpoint, the x of the created node. */
  xm: number;
}

export interface DendroLayout {
  /** Leaf indices in display order (a permutation of 0..n-1). */
  order: number[];
  /** x slot per leaf index. */
  leafX: number[];
  elbows: Elbow[];
  /** Height of the last merge (0 when there are none). */
  top: number;
}

export function layoutDendrogram(d: DendrogramPayload): DendroLayout {
  const n = d.n_samples;
  const total = 2 * n - 1;
  if (n === 1 || d.merges.length === 0) {
    return { order: [0], leafX: [0], elbows: [], top: 0 };
  }

  const left = new Array<number>(total).fill(-1);
  const right = new Array<number>(total).fill(-1);
  d.merges.forEach(([l, r], k) => {
    left[n + k] = l;
    right[n + k] = r;
  });

  const order: number[] = [];
  const stack: number[] = [total - 1];
  while (stack.length > 0) {
    const node = stack.pop()!;
    if (node < n) {
      order.push(node);
    } else {
      stack.push(right[node], left[node]);
    }
  }

  const leafX = new Array<number>(n).fill(0);
  order.forEach((leaf, slot) => {
    leafX[leaf] = slot;
  });

  const nodeX = new Array<number>(total).fill(0);
  const nodeY = new Array<number>(total).fill(0);
  for (let leaf = 0; leaf < n; leaf += 1) {
    nodeX[leaf] = leafX[leaf];
  }
  const elbows: Elbow[] = d.merges.map(([l, r, distance], k) => {
    const node = n + k;
    nodeX[node] = (nodeX[l] + nodeX[r]) / 2;
    nodeY[node] = distance;
    return {
      merge: k,
      x1: nodeX[l],
      y1: nodeY[l],
      x2: nodeX[r],
      y2: nodeY[r],
      y: distance,
      xm: nodeX[node],
    };
  });

  return { order, leafX, elbows, top: d.merges[d.merges.length - 1][2] };
}

/** Cluster id per merge at the given threshold, or -1 for merges above
 * it (drawn in the neutral color). A kept merge inherits the cluster of
 * the leaves below it, which the cut already numbered. */
export function mergeClusters(d: DendrogramPayload, threshold: number): number[] {
  const assignments = cutAssignments(d, threshold);
  const n = d.n_samples;
  const clusterOf = [...assignments, ...new Array<number>(d.merges.length).fill(-1)];
  d.merges.forEach(([l, , distance], k) => {
    if (distance <= threshold) {
      clusterOf[n + k] = clusterOf[l];
    }
  });
  return d.merges.map(([, , distance], k) => (distance <= threshold ? clusterOf[n + k] : -1));
}
