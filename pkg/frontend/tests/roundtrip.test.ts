// @vitest-environment happy-dom
// Scripted end-to-end session against a real server: two experts work a
// 10-item queue through the UI layers (keyboard -> session -> fetch), then
// the export and the stats panel are checked against the expected merges.

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient, type Label } from "../src/api.js";
import { bindLabelKeys } from "../src/keyboard.js";
import { ExpertSession } from "../src/session.js";
import { renderSession, renderStats } from "../src/view.js";
import {
  freePort,
  pythonKappa,
  startServer,
  stopServer,
  waitFor,
  waitReady,
  writeFixture,
  type CrowdItem,
} from "./helpers.js";

// 7 items where the experts will agree, 2 where they disagree over a clear
// crowd majority, 1 where they disagree over a tied crowd vote, plus 2
// unanimous items that must never enter the queue.
const ITEMS: CrowdItem[] = [
  { id: "q01", text: "disputed message one", crowd: "AAADD" },
  { id: "q02", text: "disputed message two", crowd: "BBBAD" },
  { id: "q03", text: "disputed message three", crowd: "CCCAD" },
  { id: "q04", text: "disputed message four", crowd: "DDDAB" },
  { id: "q05", text: "disputed message five", crowd: "AAABB" },
  { id: "q06", text: "disputed message six", crowd: "CCCBB" },
  { id: "q07", text: "disputed message seven", crowd: "DDDCC" },
  { id: "q08", text: "majority-backed disagreement", crowd: "AADDD" },
  { id: "q09", text: "another backed disagreement", crowd: "BBBCC" },
  { id: "q10", text: "tied crowd vote", crowd: "AABBC" },
  { id: "u01", text: "everyone agreed here", crowd: "DDDDD" },
  { id: "u02", text: "and here as well", crowd: "BBBBB" },
];

const EXPERT1: Record<string, Label> = {
  q01: "A", q02: "B", q03: "C", q04: "D", q05: "A",
  q06: "C", q07: "D", q08: "A", q09: "C", q10: "B",
};
const EXPERT2: Record<string, Label> = {
  q01: "A", q02: "B", q03: "C", q04: "D", q05: "A",
  q06: "C", q07: "D", q08: "C", q09: "D", q10: "C",
};

// (expert1, expert2) pairs in queue order, for the kappa cross-check
const PAIRS = Object.keys(EXPERT1)
  .sort()
  .map((id) => [EXPERT1[id], EXPERT2[id]] as [string, string]);

let base: string;
let proc: ReturnType<typeof startServer>;

beforeAll(async () => {
  const paths = writeFixture(ITEMS);
  const port = await freePort();
  proc = startServer(paths, port);
  base = `http://127.0.0.1:${port}`;
  await waitReady(base);
}, 90_000);

afterAll(async () => {
  await stopServer(proc);
});

async function runScriptedSession(expertId: string, script: Record<string, Label>) {
  const root = document.createElement("div");
  document.body.appendChild(root);
  const api = new ApiClient(base);
  const options = {
    expertId,
    showCrowd: true,
    exportUrl: api.exportUrl(),
    onLabel: (label: Label) => void session.submit(label),
    onRetry: () => void session.retry(),
  };
  const session = new ExpertSession(api, expertId, (state) =>
    renderSession(root, state, options)
  );
  const unbind = bindLabelKeys(window, (label) => void session.submit(label));
  await session.start();
  let labeled = 0;
  while (session.state.kind !== "done") {
    expect(session.state.kind).toBe("labeling");
    if (session.state.kind !== "labeling") {
      break;
    }
    const itemId = session.state.item.item_id;
    expect(root.querySelector(".item-text")?.textContent).toBe(
      ITEMS.find((i) => i.id === itemId)?.text
    );
    const label = script[itemId];
    expect(label).toBeDefined();
    window.dispatchEvent(new KeyboardEvent("keydown", { key: label!.toLowerCase() }));
    await waitFor(
      () =>
        session.state.kind === "done" ||
        (session.state.kind === "labeling" && session.state.item.item_id !== itemId),
      15_000,
      `advance past ${itemId}`
    );
    labeled += 1;
    expect(labeled).toBeLessThanOrEqual(ITEMS.length);
  }
  expect(labeled).toBe(10);
  expect(root.querySelector("a.export-link")).not.toBeNull();
  unbind();
  root.remove();
}

describe("scripted two-expert session", () => {
  it("resolves 7 unanimously, falls back twice, drops the tie, and reports the right kappa", async () => {
    await runScriptedSession("expert1", EXPERT1);
    await runScriptedSession("expert2", EXPERT2);

    // export: 7 R2U + 2 R2S rows, the dropped item absent
    const exportText = await (await fetch(`${base}/api/export`)).text();
    const rows = exportText
      .trim()
      .split(/\r?\n/)
      .slice(1)
      .map((line) => line.trim().split(","));
    expect(rows.length).toBe(9);
    const byProvenance = new Map<string, string[]>();
    for (const [itemId, , provenance] of rows) {
      byProvenance.set(provenance!, [...(byProvenance.get(provenance!) ?? []), itemId!]);
    }
    expect(byProvenance.get("R2U")?.length).toBe(7);
    expect((byProvenance.get("R2S") ?? []).sort()).toEqual(["q08", "q09"]);
    expect(exportText).not.toContain("q10");

    // fallback labels adopt the crowd majority
    const gold = new Map(rows.map(([itemId, label]) => [itemId, label]));
    expect(gold.get("q08")).toBe("D");
    expect(gold.get("q09")).toBe("B");

    // server stats vs the Python evaluation kappa on the same pairs
    const stats = await new ApiClient(base).stats();
    expect(stats.status_counts["resolved"]).toBe(9);
    expect(stats.status_counts["dropped"]).toBe(1);
    expect(stats.total).toBe(10);
    const expected = pythonKappa(PAIRS);
    expect(stats.kappa).not.toBeNull();
    expect(Math.abs((stats.kappa ?? NaN) - expected)).toBeLessThan(1e-12);

    // the stats panel shows exactly the server value
    const panel = document.createElement("div");
    document.body.appendChild(panel);
    renderStats(panel, stats);
    expect(panel.querySelector(".kappa")?.textContent).toBe(
      `expert agreement (kappa): ${expected.toFixed(3)}`
    );
    expect(panel.textContent).toContain("resolved: 7 unanimous, 2 majority-fallback of 10");
  }, 120_000);
});
