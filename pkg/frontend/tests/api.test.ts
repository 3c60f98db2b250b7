import { describe, expect, test } from "vitest";

import { ApiClient, ApiError, MUTATION_ENDPOINTS } from "../src/api.js";

interface Call {
  url: string;
  method: string;
  body: unknown;
}

/** fetch stub that replays a scripted list of [status, body] responses. */
function scripted(responses: Array<[number, unknown]>): { calls: Call[]; fetch: typeof fetch } {
  const calls: Call[] = [];
  const queue = [...responses];
  const fetchImpl = async (input: string, init?: RequestInit): Promise<Response> => {
    calls.push({
      url: input,
      method: init?.method ?? "GET",
      body: init?.body ? JSON.parse(init.body as string) : undefined,
    });
    const next = queue.shift();
    if (!next) {
      throw new Error("scripted fetch ran out of responses");
    }
    const [status, body] = next;
    return new Response(JSON.stringify(body), {
      status,
      headers: { "Content-Type": "application/json" },
    });
  };
  return { calls, fetch: fetchImpl as typeof fetch };
}

describe("ApiClient", () => {
  test("GET hits the expected path and parses the body", async () => {
    const { calls, fetch } = scripted([[200, [{ project_id: "demo" }]]]);
    const api = new ApiClient("http://host", fetch);
    const projects = await api.listProjects();
    expect(projects[0].project_id).toBe("demo");
    expect(calls[0].url).toBe("http://host/api/projects");
    expect(calls[0].method).toBe("GET");
  });

  test("error payloads become ApiError with code and detail", async () => {
    const { fetch } = scripted([
      [409, { http_status: 409, code: "stale_version", message: "not latest", detail: "latest is thv-1234567890abcdef" }],
    ]);
    const api = new ApiClient("http://host", fetch);
    let caught: unknown;
    try {
      await api.putTheory("demo", "thv-0", { text: "x", author_note: "n" });
    } catch (err) {
      caught = err;
    }
    expect(caught).toBeInstanceOf(ApiError);
    const apiErr = caught as ApiError;
    expect(apiErr.httpStatus).toBe(409);
    expect(apiErr.code).toBe("stale_version");
    expect(apiErr.detail).toBe("latest is thv-1234567890abcdef");
  });

  test("non-JSON error bodies still raise a typed error", async () => {
    const fetchImpl = (async () => new Response("boom", { status: 500 })) as typeof fetch;
    const api = new ApiClient("http://host", fetchImpl);
    await expect(api.listProjects()).rejects.toMatchObject({ code: "http_error", httpStatus: 500 });
  });

  test("every request lands in the log with its status", async () => {
    const { fetch } = scripted([
      [200, []],
      [201, { verdict_id: "vrd-000001" }],
    ]);
    const api = new ApiClient("http://host", fetch);
    await api.listProjects();
    await api.postVerdict("demo", "merge", "approve", "fine");
    expect(api.log).toEqual([
      { method: "GET", path: "/api/projects", status: 200 },
      { method: "POST", path: "/api/projects/demo/verdicts", status: 201 },
    ]);
  });

  test("verdict body carries gate, decision, and note", async () => {
    const { calls, fetch } = scripted([[201, { verdict_id: "vrd-000001" }]]);
    const api = new ApiClient("http://host", fetch);
    await api.postVerdict("demo", "merge", "reject", "needs work");
    expect(calls[0].body).toEqual({ gate: "merge", decision: "reject", note: "needs work" });
  });

  test("diff query keeps the from/to parameter names", async () => {
    const { calls, fetch } = scripted([[200, { from: "a", to: "b", diff: "" }]]);
    const api = new ApiClient("http://host", fetch);
    await api.getDiff("demo", "thv-a", "thv-b");
    expect(calls[0].url).toBe("http://host/api/projects/demo/diff?from=thv-a&to=thv-b");
  });

  test("stage options are wrapped under an options key", async () => {
    const { calls, fetch } = scripted([[202, { run_id: "run-0001-repair", status: "running" }]]);
    const api = new ApiClient("http://host", fetch);
    await api.postStage("demo", "repair", { dry_run: true });
    expect(calls[0].body).toEqual({ options: { dry_run: true } });
  });

  test("pollRun keeps polling until the run leaves running", async () => {
    const { calls, fetch } = scripted([
      [200, { run_id: "r", stage: "merge", status: "running" }],
      [200, { run_id: "r", stage: "merge", status: "running" }],
      [200, { run_id: "r", stage: "merge", status: "ok", notes: "1 merge notes" }],
    ]);
    const api = new ApiClient("http://host", fetch);
    const ticks: string[] = [];
    const finished = await api.pollRun("r", {
      intervalMs: 1,
      onTick: (record) => ticks.push(record.status),
    });
    expect(finished.status).toBe("ok");
    expect(calls.length).toBe(3);
    expect(ticks).toEqual(["running", "running"]);
  });

  test("pollRun gives up after the timeout", async () => {
    const always = (async () =>
      new Response(JSON.stringify({ run_id: "r", stage: "x", status: "running" }), { status: 200 })) as typeof fetch;
    const api = new ApiClient("http://host", always);
    await expect(api.pollRun("r", { intervalMs: 1, timeoutMs: 10 })).rejects.toThrow(/still running/);
  });
});

describe("MUTATION_ENDPOINTS", () => {
  test("covers exactly the documented write surfaces", () => {
    const allowed = [
      "PUT /api/projects/demo/theories/thv-1234567890abcdef",
      "POST /api/projects/demo/stages/repair",
      "POST /api/projects/demo/verdicts",
    ];
    for (const entry of allowed) {
      expect(MUTATION_ENDPOINTS.some((re) => re.test(entry))).toBe(true);
    }
    const denied = [
      "DELETE /api/projects/demo/theories/thv-1234567890abcdef",
      "POST /api/projects/demo/theories/thv-1234567890abcdef",
      "PUT /api/projects/demo/verdicts",
    ];
    for (const entry of denied) {
      expect(MUTATION_ENDPOINTS.some((re) => re.test(entry))).toBe(false);
    }
  });
});
