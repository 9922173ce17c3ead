/**
 * Thin fetch wrapper over the service plus the mutation queue.
 *
 * The queue is the concurrency model of the whole client: at most one
 * filter mutation (or rollback) is in flight, later clicks wait their
 * turn, so the provenance chain on the server matches click order.
 */

import type {
  AggregatePayload,
  DatasetDocument,
  ExplorerPayload,
  FilterOperation,
  ImportancePayload,
  JobSnapshot,
  MutationResponse,
  ProvenanceEntry,
  SessionDocument,
} from './types.js';

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    detail: string,
  ) {
    super(detail);
  }
}

async function decode<T>(response: Response): Promise<T> {
  if (!response.ok) {
    let detail = `HTTP ${response.status}`;
    try {
      const body = (await response.json()) as { detail?: string };
      if (body.detail) detail = body.detail;
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new ApiError(response.status, detail);
  }
  return (await response.json()) as T;
}

export class ApiClient {
  private chain: Promise<unknown> = Promise.resolve();

  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private get(path: string): Promise<Response> {
    return this.fetchFn(this.baseUrl + path);
  }

  private post(path: string, body?: unknown, contentType = 'application/json'): Promise<Response> {
    return this.fetchFn(this.baseUrl + path, {
      method: 'POST',
      headers: { 'content-type': contentType },
      body: typeof body === 'string' ? body : JSON.stringify(body),
    });
  }

  health(): Promise<{ status: string }> {
    return this.get('/health').then((r) => decode(r));
  }

  uploadDataset(csvText: string, targetColumn: string): Promise<DatasetDocument> {
    const q = encodeURIComponent(targetColumn);
    return this.post(`/datasets?target_column=${q}`, csvText, 'text/csv').then(
      (r) => decode(r),
    );
  }

  createSession(datasetId: string): Promise<SessionDocument> {
    return this.post('/sessions', { dataset_id: datasetId }).then((r) => decode(r));
  }

  getSession(sessionId: string): Promise<SessionDocument> {
    return this.get(`/sessions/${sessionId}`).then((r) => decode(r));
  }

  importSession(document: SessionDocument): Promise<SessionDocument> {
    return this.post('/sessions/import', document).then((r) => decode(r));
  }

  explorer(sessionId: string): Promise<ExplorerPayload> {
    return this.get(`/sessions/${sessionId}/explorer`).then((r) => decode(r));
  }

  aggregate(sessionId: string): Promise<AggregatePayload> {
    return this.get(`/sessions/${sessionId}/aggregate`).then((r) => decode(r));
  }

  provenance(sessionId: string): Promise<{ entries: ProvenanceEntry[] }> {
    return this.get(`/sessions/${sessionId}/provenance`).then((r) => decode(r));
  }

  /**
   * Serialize mutations: each call waits for every earlier mutation to
   * settle before its request is issued.
   */
  private enqueue<T>(task: () => Promise<T>): Promise<T> {
    const next = this.chain.then(task, task);
    this.chain = next.catch(() => undefined);
    return next;
  }

  applyFilter(
    sessionId: string,
    operations: FilterOperation[],
    label?: string,
  ): Promise<MutationResponse> {
    return this.enqueue(() =>
      this.post(`/sessions/${sessionId}/filter`, {
        operations,
        ...(label === undefined ? {} : { label }),
      }).then((r) => decode<MutationResponse>(r)),
    );
  }

  rollback(sessionId: string, stage: number): Promise<MutationResponse> {
    return this.enqueue(() =>
      this.post(`/sessions/${sessionId}/rollback`, { stage }).then((r) =>
        decode<MutationResponse>(r),
      ),
    );
  }

  startSearch(
    sessionId: string,
    body: {
      algorithm: string;
      objective: string;
      budget?: number;
      seed?: number;
      t0?: number;
      alpha?: number;
    },
  ): Promise<{ job_id: string }> {
    return this.post(`/sessions/${sessionId}/search`, body).then((r) => decode(r));
  }

  job(jobId: string): Promise<JobSnapshot> {
    return this.get(`/jobs/${jobId}`).then((r) => decode(r));
  }

  importance(
    sessionId: string,
    body: { fractions?: number[]; repeats?: number; seed?: number },
  ): Promise<ImportancePayload> {
    return this.post(`/sessions/${sessionId}/importance`, body).then((r) => decode(r));
  }
}
