/**
 * Page controller: owns the session snapshot, renders the three views,
 * and turns clicks into service requests.
 *
 * All statistics on screen come from service payloads; this file only
 * routes them. Mutations go through the ApiClient queue, so rapid
 * clicking yields a provenance chain in click order.
 */

import { ApiClient } from './api.js';
import type {
  AggregatePayload,
  ExplorerPayload,
  MutationResponse,
  ProvenanceEntry,
  SessionDocument,
  WireFilter,
} from './types.js';
import { renderExplorer, scaleFromAxis } from './explorer.js';
import { renderAggregate } from './aggregate.js';
import { renderProvenance } from './provenance.js';

export class App {
  filter: WireFilter;
  entries: ProvenanceEntry[];
  explorerPayload: ExplorerPayload | null = null;
  aggregatePayload: AggregatePayload | null = null;

  private readonly explorerEl: HTMLElement;
  private readonly aggregateEl: HTMLElement;
  private readonly provenanceEl: HTMLElement;

  constructor(
    private readonly client: ApiClient,
    private readonly session: SessionDocument,
    root: HTMLElement,
  ) {
    this.filter = session.filter;
    this.entries = [...session.provenance];
    root.innerHTML =
      '<div class="explorer-pane"></div>' +
      '<div class="aggregate-pane"></div>' +
      '<div class="provenance-pane"></div>';
    this.explorerEl = root.querySelector('.explorer-pane') as HTMLElement;
    this.aggregateEl = root.querySelector('.aggregate-pane') as HTMLElement;
    this.provenanceEl = root.querySelector('.provenance-pane') as HTMLElement;
    root.addEventListener('click', (event) => this.onClick(event));
  }

  async start(): Promise<void> {
    const [explorer, aggregate] = await Promise.all([
      this.client.explorer(this.session.session_id),
      this.client.aggregate(this.session.session_id),
    ]);
    this.explorerPayload = explorer;
    this.aggregatePayload = aggregate;
    this.render();
  }

  render(): void {
    if (this.explorerPayload !== null) {
      const scale = scaleFromAxis(this.explorerPayload);
      this.explorerEl.innerHTML = renderExplorer(this.explorerPayload, scale);
      if (this.aggregatePayload !== null) {
        this.aggregateEl.innerHTML = renderAggregate(this.aggregatePayload, scale);
      }
    }
    this.provenanceEl.innerHTML = renderProvenance(this.entries);
  }

  /**
   * Deselecting the last remaining level of a parameter would make the
   * filter match nothing that parameter allows; the click is ignored.
   */
  isLastSelected(parameter: string, level: string): boolean {
    const entry = this.filter.parameters.find((p) => p.name === parameter);
    if (!entry) return false;
    return entry.selected_levels.length === 1 && entry.selected_levels[0] === level;
  }

  private applyMutation(response: MutationResponse): void {
    this.filter = response.filter;
    this.entries.push(response.provenance_entry);
    this.explorerPayload = response.explorer;
    this.aggregatePayload = response.aggregate;
    this.render();
  }

  async toggleLevel(parameter: string, level: string): Promise<void> {
    if (this.isLastSelected(parameter, level)) return;
    const response = await this.client.applyFilter(this.session.session_id, [
      { op: 'toggle_level', parameter, level },
    ]);
    this.applyMutation(response);
  }

  async toggleParameter(parameter: string): Promise<void> {
    const response = await this.client.applyFilter(this.session.session_id, [
      { op: 'toggle_parameter', parameter },
    ]);
    this.applyMutation(response);
  }

  async rollbackTo(stage: number): Promise<void> {
    const response = await this.client.rollback(this.session.session_id, stage);
    this.applyMutation(response);
  }

  private onClick(event: Event): void {
    const target = event.target as Element | null;
    if (!target) return;
    const toggle = target.closest('.parameter-toggle');
    if (toggle) {
      void this.toggleParameter(toggle.getAttribute('data-parameter') ?? '');
      return;
    }
    const bar = target.closest('.bar');
    if (bar && target.closest('.level-label')) {
      void this.toggleLevel(
        bar.getAttribute('data-parameter') ?? '',
        bar.getAttribute('data-level') ?? '',
      );
      return;
    }
    const stage = target.closest('.stage');
    if (stage) {
      void this.rollbackTo(Number(stage.getAttribute('data-stage')));
    }
  }
}

/** Boot helper for index.html: upload a CSV, open a session, render. */
export async function boot(
  baseUrl: string,
  csvText: string,
  targetColumn: string,
  root: HTMLElement,
): Promise<App> {
  const client = new ApiClient(baseUrl);
  const dataset = await client.uploadDataset(csvText, targetColumn);
  const session = await client.createSession(dataset.dataset_id);
  const app = new App(client, session, root);
  await app.start();
  return app;
}
