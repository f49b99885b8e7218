/** ViewState and its URL-hash round trip. The hash is the only client
 * persistence: reloading a shared link restores threshold, selection
 * and channel; labels live on the server, drafts only in memory. */

export interface ViewState {
  /** Cut threshold; null until the dendrogram arrives (then defaults). */
  threshold: number | null;
  cluster: number | null;
  scenario: string | null;
  channel: string;
}

export const DEFAULT_CHANNEL = "occupancy";

export function parseHash(hash: string): ViewState {
  const params = new URLSearchParams(hash.replace(/^#/, ""));
  const num = (key: string): number | null => {
    const raw = params.get(key);
    if (raw === null || raw === "") return null;
    const value = Number(raw);
    return Number.isFinite(value) && value >= 0 ? value : null;
  };
  const threshold = num("t");
  const cluster = num("c");
  const channel = params.get("ch");
  return {
    threshold,
    cluster: cluster === null ? null : Math.trunc(cluster),
    scenario: params.get("s"),
    channel: channel === null || channel === "" ? DEFAULT_CHANNEL : channel,
  };
}

export function formatHash(state: ViewState): string {
  const params = new URLSearchParams();
  if (state.threshold !== null) params.set("t", trimFloat(state.threshold));
  if (state.cluster !== null) params.set("c", String(state.cluster));
  if (state.scenario !== null) params.set("s", state.scenario);
  if (state.channel !== DEFAULT_CHANNEL) params.set("ch", state.channel);
  const text = params.toString();
  return text === "" ? "" : `#${text}`;
}

function trimFloat(value: number): string {
  const text = value.toFixed(4);
  return text.includes(".") ? text.replace(/\.?0+$/, "") : text;
}
