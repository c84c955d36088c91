// Fetch-based client for the adjudication API. Every read the UI displays
// goes through these calls; the UI never recomputes server numbers.

import type {
  AnnotateResponse,
  AnnotationSubmission,
  CandidateDetail,
  CandidateKey,
  Progress,
  QueueResponse,
  Schema,
} from "./types";

/** Server-side rejection (validation error); do not retry. */
export class RejectedError extends Error {
  readonly status: number;

  constructor(status: number, message: string) {
    super(message);
    this.status = status;
  }
}

export type FetchLike = (
  input: string,
  init?: RequestInit,
) => Promise<Response>;

export class ApiClient {
  private readonly base: string;
  private readonly fetchFn: FetchLike;

  constructor(baseUrl = "", fetchFn?: FetchLike) {
    this.base = baseUrl.replace(/\/$/, "");
    this.fetchFn = fetchFn ?? ((input, init) => fetch(input, init));
  }

  private async getJson<T>(path: string): Promise<T> {
    const resp = await this.fetchFn(this.base + path);
    if (!resp.ok) {
      throw new RejectedError(resp.status, await errorMessage(resp));
    }
    return (await resp.json()) as T;
  }

  schema(): Promise<Schema> {
    return this.getJson<Schema>("/schema");
  }

  queue(limit?: number): Promise<QueueResponse> {
    const q = limit === undefined ? "" : `?limit=${limit}`;
    return this.getJson<QueueResponse>(`/queue${q}`);
  }

  candidate(key: CandidateKey): Promise<CandidateDetail> {
    const { utterance_id, system_id, ref_index } = key;
    return this.getJson<CandidateDetail>(
      `/candidate/${encodeURIComponent(utterance_id)}/${encodeURIComponent(
        system_id,
      )}/${ref_index}`,
    );
  }

  progress(): Promise<Progress> {
    return this.getJson<Progress>("/progress");
  }

  exportUrl(): string {
    return `${this.base}/export`;
  }

  exportLabels(): Promise<{
    labels: unknown[];
    category_totals: Record<string, number>;
    pending: number;
  }> {
    return this.getJson("/export");
  }

  /**
   * POST one decision. Throws RejectedError on a 4xx validation response
   * and a plain Error on network/server failure (the retry queue's cue).
   */
  async annotate(submission: AnnotationSubmission): Promise<AnnotateResponse> {
    const resp = await this.fetchFn(`${this.base}/annotate`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(submission),
    });
    if (resp.status >= 400 && resp.status < 500) {
      throw new RejectedError(resp.status, await errorMessage(resp));
    }
    if (!resp.ok) {
      throw new Error(`server error ${resp.status}`);
    }
    return (await resp.json()) as AnnotateResponse;
  }
}

async function errorMessage(resp: Response): Promise<string> {
  try {
    const body = (await resp.json()) as { error?: string };
    return body.error ?? `HTTP ${resp.status}`;
  } catch {
    return `HTTP ${resp.status}`;
  }
}
