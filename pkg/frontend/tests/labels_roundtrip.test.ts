/** Labeling persistence: posted labels survive a GET, merge with later
 * posts, and reappear after the server is restarted on the same run. */

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import type { LabelsPayload, ScenarioSummary } from "../src/types.js";
import { buildRun, getJson, postJson, removeRun, startServer, type RunningServer } from "./helpers.js";

let runDir: string;
let server: RunningServer;
let ids: string[];

beforeAll(async () => {
  runDir = buildRun();
  server = await startServer(runDir);
  const scenarios = await getJson<ScenarioSummary[]>(server.base, "/api/scenarios");
  ids = scenarios.map((s) => s.scenario_id);
  expect(ids.length).toBeGreaterThanOrEqual(3);
});

afterAll(() => {
  server?.stop();
  if (runDir) removeRun(runDir);
});

describe("label round trip", () => {
  it("posts labels and reads the identical set back", async () => {
    const first = { [ids[0]]: "left_turn", [ids[1]]: "crossing" };
    const posted = await postJson(server.base, "/api/labels", { labels: first });
    expect(posted.status).toBe(200);

    const stored = await getJson<LabelsPayload>(server.base, "/api/labels");
    expect(stored.labels).toEqual(first);
  });

  it("merges later posts instead of replacing", async () => {
    const update = { [ids[1]]: "crossing_revised", [ids[2]]: "following" };
    const posted = await postJson(server.base, "/api/labels", { labels: update });
    expect(posted.status).toBe(200);

    const stored = await getJson<LabelsPayload>(server.base, "/api/labels");
    expect(stored.labels).toEqual({
      [ids[0]]: "left_turn",
      [ids[1]]: "crossing_revised",
      [ids[2]]: "following",
    });
  });

  it("reproduces every label after a server restart", async () => {
    const before = await getJson<LabelsPayload>(server.base, "/api/labels");
    server.stop();
    server = await startServer(runDir);
    const after = await getJson<LabelsPayload>(server.base, "/api/labels");
    expect(after.labels).toEqual(before.labels);

    const scenarios = await getJson<ScenarioSummary[]>(server.base, "/api/scenarios");
    const labeled = new Map(scenarios.map((s) => [s.scenario_id, s.label]));
    expect(labeled.get(ids[0])).toBe("left_turn");
    expect(labeled.get(ids[2])).toBe("following");
  });

  it("rejects unknown scenario ids without touching stored labels", async () => {
    const before = await getJson<LabelsPayload>(server.base, "/api/labels");
    const posted = await postJson(server.base, "/api/labels", {
      labels: { not_a_scenario: "x" },
    });
    expect(posted.status).toBe(400);
    const after = await getJson<LabelsPayload>(server.base, "/api/labels");
    expect(after.labels).toEqual(before.labels);
  });
});
