/**
 * Optimizer panel: start a search job, poll its trace, and plot
 * best-so-far against evaluations, with the exhaustive optimum drawn
 * as a reference line when it is known.
 */

import type { SearchTrace, JobSnapshot } from './types.js';
import { ApiClient } from './api.js';
import { makeScale, yFor } from './scale.js';

const px = (v: number): string => v.toFixed(2);

export interface TracePlotLayout {
  width: number;
  height: number;
  padLeft: number;
  padRight: number;
  padTop: number;
  padBottom: number;
}

export const PLOT_LAYOUT: TracePlotLayout = {
  width: 420,
  height: 180,
  padLeft: 46,
  padRight: 18,
  padTop: 14,
  padBottom: 24,
};

export function renderTracePlot(
  trace: SearchTrace,
  optimum: number | null = null,
  layout: TracePlotLayout = PLOT_LAYOUT,
): string {
  const bests: Array<{ step: number; best: number }> = [];
  for (const s of trace.steps) {
    if (s.best_value !== null) bests.push({ step: s.step, best: s.best_value });
  }
  const ys = bests.map((b) => b.best);
  if (optimum !== null) ys.push(optimum);
  const lo = ys.length ? Math.min(...ys) : 0;
  const hi = ys.length ? Math.max(...ys) : 1;
  const scale = makeScale(lo, hi, layout.padTop, layout.height - layout.padBottom);
  const lastStep = bests.length ? bests[bests.length - 1]!.step : 1;
  const xFor = (step: number) =>
    layout.padLeft +
    ((step - 1) / Math.max(1, lastStep - 1)) *
      (layout.width - layout.padLeft - layout.padRight);

  const parts: string[] = [];
  parts.push(
    `<svg class="trace-plot" xmlns="http://www.w3.org/2000/svg" ` +
      `width="${layout.width}" height="${layout.height}" ` +
      `viewBox="0 0 ${layout.width} ${layout.height}">`,
  );
  if (optimum !== null) {
    const y = yFor(scale, optimum);
    parts.push(
      `<line class="optimum-line" x1="${px(layout.padLeft)}" y1="${px(y)}" ` +
        `x2="${px(layout.width - layout.padRight)}" y2="${px(y)}" ` +
        `stroke="#888" stroke-width="1" stroke-dasharray="5 4"/>`,
      `<text class="optimum-star" x="${px(layout.width - layout.padRight + 3)}" ` +
        `y="${px(y + 4)}" font-size="13" fill="#888">*</text>`,
    );
  }
  if (bests.length > 0) {
    const pts = bests.map((b) => `${px(xFor(b.step))},${px(yFor(scale, b.best))}`);
    parts.push(
      `<polyline class="best-line" points="${pts.join(' ')}" fill="none" ` +
        `stroke="#2c6cf5" stroke-width="1.5"/>`,
    );
    const last = bests[bests.length - 1]!;
    parts.push(
      `<circle class="best-end" cx="${px(xFor(last.step))}" ` +
        `cy="${px(yFor(scale, last.best))}" r="3" fill="#2c6cf5"/>`,
    );
  }
  const caption =
    trace.best_value === null
      ? `${trace.algorithm}: no feasible configuration yet`
      : `${trace.algorithm} best: ${trace.best_value}`;
  parts.push(
    `<text class="trace-caption" x="${px(layout.padLeft)}" ` +
      `y="${px(layout.height - 8)}" font-size="11" fill="#1a1a1a">${caption}</text>`,
    '</svg>',
  );
  return parts.join('');
}

/**
 * Run a job to completion, invoking onUpdate with every poll so the
 * plot can animate. Resolves with the final snapshot; rejects on a
 * failed job.
 */
export async function runSearchJob(
  client: ApiClient,
  sessionId: string,
  body: { algorithm: string; objective: string; budget?: number; seed?: number },
  onUpdate: (snapshot: JobSnapshot) => void,
  pollMs = 150,
  sleep: (ms: number) => Promise<void> = (ms) => new Promise((r) => setTimeout(r, ms)),
): Promise<JobSnapshot> {
  const { job_id } = await client.startSearch(sessionId, body);
  for (;;) {
    const snapshot = await client.job(job_id);
    onUpdate(snapshot);
    if (snapshot.status === 'failed') {
      throw new Error(snapshot.error ?? 'search failed');
    }
    if (snapshot.status === 'finished') return snapshot;
    await sleep(pollMs);
  }
}
