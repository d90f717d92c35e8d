// Unit tests for the session state machine with a mocked fetch.

import { afterEach, describe, expect, it, vi } from "vitest";

import { ApiClient, type QueueItem } from "../src/api.js";
import { ExpertSession, type SessionState } from "../src/session.js";

function item(id: string): QueueItem {
  return {
    item_id: id,
    anon_text: `text of ${id}`,
    status: "pending",
    crowd_counts: { A: 3, B: 0, C: 0, D: 2 },
  };
}

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

afterEach(() => {
  vi.unstubAllGlobals();
});

describe("ExpertSession", () => {
  it("walks the happy path: load, submit, advance, done", async () => {
    const calls: string[] = [];
    vi.stubGlobal("fetch", async (url: string, init?: RequestInit) => {
      calls.push(`${init?.method ?? "GET"} ${url}`);
      if (url.includes("/api/queue/next")) {
        return calls.filter((c) => c.includes("queue/next")).length === 1
          ? jsonResponse(item("q1"))
          : jsonResponse({ done: true });
      }
      return jsonResponse({ outcome: "recorded", gold: null });
    });

    const states: SessionState[] = [];
    const session = new ExpertSession(new ApiClient(""), "expert1", (s) => states.push(s));
    await session.start();
    expect(session.state.kind).toBe("labeling");
    await session.submit("A");
    expect(session.state.kind).toBe("done");
    expect(calls).toContain("POST /api/items/q1/labels");
    expect(states.map((s) => s.kind)).toEqual([
      "loading",
      "labeling",
      "submitting",
      "loading",
      "done",
    ]);
  });

  it("ignores submissions while one is in flight", async () => {
    let submits = 0;
    let release: (() => void) | undefined;
    vi.stubGlobal("fetch", async (url: string, init?: RequestInit) => {
      if (init?.method === "POST") {
        submits += 1;
        await new Promise<void>((resolve) => {
          release = resolve;
        });
        return jsonResponse({ outcome: "recorded", gold: null });
      }
      return submits === 0 ? jsonResponse(item("q1")) : jsonResponse({ done: true });
    });

    const session = new ExpertSession(new ApiClient(""), "expert1");
    await session.start();
    const first = session.submit("A");
    await session.submit("B"); // swallowed: state is "submitting"
    expect(submits).toBe(1);
    release?.();
    await first;
    expect(session.state.kind).toBe("done");
  });

  it("surfaces a 409 as a notice and advances without retry", async () => {
    let nextCalls = 0;
    vi.stubGlobal("fetch", async (url: string, init?: RequestInit) => {
      if (init?.method === "POST") {
        return jsonResponse({ detail: "already labeled" }, 409);
      }
      nextCalls += 1;
      return nextCalls === 1 ? jsonResponse(item("q1")) : jsonResponse(item("q2"));
    });

    const session = new ExpertSession(new ApiClient(""), "expert1");
    await session.start();
    await session.submit("A");
    expect(session.state.kind).toBe("labeling");
    if (session.state.kind === "labeling") {
      expect(session.state.item.item_id).toBe("q2");
      expect(session.state.notice).toContain("already labeled");
    }
  });

  it("keeps the item and pending label on network failure, then retries", async () => {
    let fail = true;
    vi.stubGlobal("fetch", async (url: string, init?: RequestInit) => {
      if (init?.method === "POST") {
        if (fail) {
          fail = false;
          throw new TypeError("network down");
        }
        return jsonResponse({ outcome: "recorded", gold: null });
      }
      return jsonResponse(item("q1"));
    });

    const session = new ExpertSession(new ApiClient(""), "expert1");
    await session.start();
    await session.submit("C");
    expect(session.state.kind).toBe("offline");
    if (session.state.kind === "offline") {
      expect(session.state.item.item_id).toBe("q1");
      expect(session.state.pendingLabel).toBe("C");
    }
    await session.retry();
    expect(session.state.kind).toBe("labeling"); // advanced to next (mock repeats q1)
  });

  it("never caches labels beyond the in-flight request", async () => {
    vi.stubGlobal("fetch", async (url: string, init?: RequestInit) => {
      if (init?.method === "POST") {
        return jsonResponse({ outcome: "recorded", gold: null });
      }
      return jsonResponse(item("q1"));
    });
    const session = new ExpertSession(new ApiClient(""), "expert1");
    await session.start();
    await session.submit("B");
    // once the request settles, no submitted label survives in the state
    expect(session.state.kind).toBe("labeling");
    expect("pendingLabel" in session.state).toBe(false);
  });
});
