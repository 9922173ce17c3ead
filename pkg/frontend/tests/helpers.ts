/** Shared test scaffolding: typed fixture access and a fake backend. */

import type {
  AggregatePayload,
  ExplorerPayload,
  ProvenanceEntry,
  SessionDocument,
  DatasetDocument,
  WireFilter,
} from '../src/types.js';
import type { FetchLike } from '../src/api.js';
import raw from './fixture.json';

export interface Fixture {
  dataset: DatasetDocument;
  session: SessionDocument;
  explorer: ExplorerPayload;
  aggregate: AggregatePayload;
  entries: ProvenanceEntry[];
}

export const fixture = raw as unknown as Fixture;

export function clone<T>(value: T): T {
  return JSON.parse(JSON.stringify(value)) as T;
}

export function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { 'content-type': 'application/json' },
  });
}

export interface RecordedRequest {
  url: string;
  method: string;
  body: unknown;
}

/**
 * In-memory stand-in for the service: answers explorer/aggregate reads
 * from the fixture and maintains a provenance list across mutations.
 * Every request is recorded for assertion.
 */
export class FakeBackend {
  requests: RecordedRequest[] = [];
  entries: ProvenanceEntry[];
  filter: WireFilter;
  /** when set, /filter and /rollback responses wait to be released */
  gate: Array<() => void> | null = null;

  constructor(session: SessionDocument) {
    this.entries = clone(session.provenance);
    this.filter = clone(session.filter);
  }

  get fetch(): FetchLike {
    return (url, init) => this.handle(url, init);
  }

  private record(url: string, init?: RequestInit): RecordedRequest {
    const body =
      typeof init?.body === 'string' && init.body.length > 0
        ? (JSON.parse(init.body) as unknown)
        : null;
    const req = { url, method: init?.method ?? 'GET', body };
    this.requests.push(req);
    return req;
  }

  private mutationResponse(entry: ProvenanceEntry): Response {
    this.entries.push(entry);
    this.filter = entry.filter;
    return jsonResponse({
      filter: entry.filter,
      provenance_entry: entry,
      explorer: fixture.explorer,
      aggregate: fixture.aggregate,
    });
  }

  private maybeGated(make: () => Response): Promise<Response> {
    if (this.gate === null) return Promise.resolve(make());
    return new Promise((resolve) => {
      this.gate!.push(() => resolve(make()));
    });
  }

  private handle(url: string, init?: RequestInit): Promise<Response> {
    const req = this.record(url, init);
    if (url.endsWith('/explorer')) return Promise.resolve(jsonResponse(fixture.explorer));
    if (url.endsWith('/aggregate')) return Promise.resolve(jsonResponse(fixture.aggregate));
    if (url.endsWith('/provenance')) {
      return Promise.resolve(jsonResponse({ entries: this.entries }));
    }
    if (url.endsWith('/rollback')) {
      return this.maybeGated(() => {
        const stage = (req.body as { stage: number }).stage;
        const source = this.entries[stage - 1]!;
        return this.mutationResponse({
          ...clone(source),
          stage: this.entries.length + 1,
          label: `rollback to stage ${stage}`,
          replicated_from: stage,
        });
      });
    }
    if (url.endsWith('/filter')) {
      return this.maybeGated(() => {
        const ops = (req.body as {
          operations: Array<{ op: string; parameter: string; level?: string }>;
        }).operations;
        const filter = clone(this.filter);
        for (const op of ops) {
          const entry = filter.parameters.find((p) => p.name === op.parameter)!;
          if (op.op === 'toggle_level') {
            const schema = fixture.dataset.parameters.find(
              (p) => p.name === op.parameter,
            )!;
            const chosen = new Set(entry.selected_levels);
            if (chosen.has(op.level!)) chosen.delete(op.level!);
            else chosen.add(op.level!);
            entry.selected_levels = schema.levels.filter((l) => chosen.has(l));
          } else if (op.op === 'toggle_parameter') {
            entry.enabled = !entry.enabled;
          }
        }
        return this.mutationResponse({
          stage: this.entries.length + 1,
          label: ops.map((o) => `${o.op} ${o.parameter}`).join('; '),
          min: 10.0,
          max: 42.0,
          replicated_from: null,
          filter,
        });
      });
    }
    return Promise.resolve(jsonResponse({ detail: `no route for ${url}` }, 404));
  }
}
