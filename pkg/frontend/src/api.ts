/**
 * Typed client for the review service.
 *
 * Every request made through this client is appended to `log`, so tests
 * can assert that no state was mutated outside the documented endpoints.
 */

import type {
  ApiErrorBody,
  ConceptGraph,
  DiffResponse,
  DocumentSummary,
  GateList,
  ProjectSummary,
  PutTheoryResult,
  RunRecord,
  SourceDocument,
  StageStarted,
  StatementRow,
  TheoryDetail,
  TheoryMeta,
  VerdictRecord,
} from "./types.js";

export class ApiError extends Error {
  readonly httpStatus: number;
  readonly code: string;
  readonly detail: string | null;

  constructor(body: ApiErrorBody) {
    super(body.message);
    this.name = "ApiError";
    this.httpStatus = body.http_status;
    this.code = body.code;
    this.detail = body.detail;
  }
}

export interface RequestLogEntry {
  method: string;
  path: string;
  status: number;
}

/** The mutating endpoints the client is allowed to touch. */
export const MUTATION_ENDPOINTS: RegExp[] = [
  /^PUT \/api\/projects\/[^/]+\/theories\/[^/]+$/,
  /^POST \/api\/projects\/[^/]+\/stages\/[^/]+$/,
  /^POST \/api\/projects\/[^/]+\/verdicts$/,
];

export interface PollOptions {
  intervalMs?: number;
  timeoutMs?: number;
  onTick?: (record: RunRecord) => void;
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  readonly log: RequestLogEntry[] = [];
  private readonly fetchImpl: FetchLike;

  constructor(
    readonly baseUrl: string,
    fetchImpl?: FetchLike,
  ) {
    this.fetchImpl = fetchImpl ?? ((input, init) => fetch(input, init));
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: { "Content-Type": "application/json" } };
    if (body !== undefined) {
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchImpl(this.baseUrl + path, init);
    this.log.push({ method, path, status: response.status });
    const text = await response.text();
    let parsed: unknown = null;
    if (text) {
      try {
        parsed = JSON.parse(text);
      } catch {
        parsed = null;
      }
    }
    if (!response.ok) {
      const fallback: ApiErrorBody = {
        http_status: response.status,
        code: "http_error",
        message: text.slice(0, 200) || response.statusText,
        detail: null,
      };
      const errBody = parsed && typeof parsed === "object" && "code" in (parsed as object)
        ? (parsed as ApiErrorBody)
        : fallback;
      throw new ApiError(errBody);
    }
    return parsed as T;
  }

  listProjects(): Promise<ProjectSummary[]> {
    return this.request("GET", "/api/projects");
  }

  listStatements(pid: string): Promise<StatementRow[]> {
    return this.request("GET", `/api/projects/${pid}/statements`);
  }

  listDocuments(pid: string): Promise<DocumentSummary[]> {
    return this.request("GET", `/api/projects/${pid}/documents`);
  }

  getDocument(pid: string, docId: string): Promise<SourceDocument> {
    return this.request("GET", `/api/projects/${pid}/documents/${docId}`);
  }

  getGraph(pid: string): Promise<ConceptGraph> {
    return this.request("GET", `/api/projects/${pid}/graph`);
  }

  getTheory(pid: string, versionId: string): Promise<TheoryDetail> {
    return this.request("GET", `/api/projects/${pid}/theories/${versionId}`);
  }

  putTheory(
    pid: string,
    versionId: string,
    body: { text: string; author_note?: string },
  ): Promise<PutTheoryResult> {
    return this.request("PUT", `/api/projects/${pid}/theories/${versionId}`, body);
  }

  getLineage(pid: string, versionId: string): Promise<TheoryMeta[]> {
    return this.request("GET", `/api/projects/${pid}/theories/${versionId}/lineage`);
  }

  getGates(pid: string): Promise<GateList> {
    return this.request("GET", `/api/projects/${pid}/gates`);
  }

  postStage(pid: string, stage: string, options?: Record<string, unknown>): Promise<StageStarted> {
    const body = options ? { options } : {};
    return this.request("POST", `/api/projects/${pid}/stages/${stage}`, body);
  }

  getRun(runId: string): Promise<RunRecord> {
    return this.request("GET", `/api/runs/${runId}`);
  }

  postVerdict(
    pid: string,
    gate: string,
    decision: "approve" | "reject",
    note: string,
  ): Promise<VerdictRecord> {
    return this.request("POST", `/api/projects/${pid}/verdicts`, { gate, decision, note });
  }

  getDiff(pid: string, fromId: string, toId: string): Promise<DiffResponse> {
    const query = new URLSearchParams({ from: fromId, to: toId });
    return this.request("GET", `/api/projects/${pid}/diff?${query}`);
  }

  /**
   * Poll a run until it leaves the "running" state. Defaults to one poll
   * per second, which is also the cadence the run console uses.
   */
  async pollRun(runId: string, options: PollOptions = {}): Promise<RunRecord> {
    const intervalMs = options.intervalMs ?? 1000;
    const timeoutMs = options.timeoutMs ?? 120_000;
    const deadline = Date.now() + timeoutMs;
    for (;;) {
      const record = await this.getRun(runId);
      if (record.status !== "running") {
        return record;
      }
      options.onTick?.(record);
      if (Date.now() > deadline) {
        throw new Error(`run ${runId} still running after ${timeoutMs}ms`);
      }
      await new Promise((resolve) => setTimeout(resolve, intervalMs));
    }
  }
}
