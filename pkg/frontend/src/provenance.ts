/**
 * Provenance Terminal: the stage chain as two value lines, max in red
 * and min in blue, one circular pointer per stage on each line.
 * Clicking a stage's hit area asks the app to roll back to it.
 */

import type { ProvenanceEntry } from './types.js';
import { makeScale, yFor } from './scale.js';

const RED = '#c62828';
const BLUE = '#1565c0';
const px = (v: number): string => v.toFixed(2);

export interface ProvenanceLayout {
  stageGap: number;
  leftPad: number;
  top: number;
  bottom: number;
  height: number;
}

export const PROV_LAYOUT: ProvenanceLayout = {
  stageGap: 72,
  leftPad: 40,
  top: 24,
  bottom: 96,
  height: 150,
};

function esc(s: string): string {
  return s
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}

export function renderProvenance(
  entries: ProvenanceEntry[],
  layout: ProvenanceLayout = PROV_LAYOUT,
): string {
  const values = entries.flatMap((e) =>
    [e.min, e.max].filter((v): v is number => v !== null),
  );
  const lo = values.length ? Math.min(...values) : 0;
  const hi = values.length ? Math.max(...values) : 1;
  const scale = makeScale(lo, hi, layout.top, layout.bottom);
  const xFor = (i: number) => layout.leftPad + i * layout.stageGap;

  const maxPts: string[] = [];
  const minPts: string[] = [];
  const nodes: string[] = [];
  entries.forEach((entry, i) => {
    const x = xFor(i);
    const pieces: string[] = [];
    if (entry.max !== null) {
      const y = yFor(scale, entry.max);
      maxPts.push(`${px(x)},${px(y)}`);
      pieces.push(
        `<circle class="max-pointer" cx="${px(x)}" cy="${px(y)}" r="4" fill="${RED}"/>`,
      );
    }
    if (entry.min !== null) {
      const y = yFor(scale, entry.min);
      minPts.push(`${px(x)},${px(y)}`);
      pieces.push(
        `<circle class="min-pointer" cx="${px(x)}" cy="${px(y)}" r="4" fill="${BLUE}"/>`,
      );
    }
    const caption =
      entry.replicated_from === null
        ? entry.label
        : `${entry.label} ↩${entry.replicated_from}`;
    pieces.push(
      `<text class="stage-number" x="${px(x)}" y="${px(layout.bottom + 18)}" ` +
        `text-anchor="middle" font-size="11" fill="#1a1a1a">${entry.stage}</text>`,
      `<text class="stage-label" x="${px(x)}" y="${px(layout.bottom + 32)}" ` +
        `text-anchor="middle" font-size="9" fill="#555">${esc(caption)}</text>`,
      // transparent hit target spanning the stage column
      `<rect class="stage-hit" x="${px(x - layout.stageGap / 2)}" y="0" ` +
        `width="${px(layout.stageGap)}" height="${px(layout.height)}" ` +
        `fill="transparent"/>`,
    );
    nodes.push(
      `<g class="stage" data-stage="${entry.stage}">${pieces.join('')}</g>`,
    );
  });

  const width = layout.leftPad * 2 + layout.stageGap * Math.max(0, entries.length - 1);
  const lines: string[] = [];
  if (maxPts.length > 1) {
    lines.push(
      `<polyline class="max-line" points="${maxPts.join(' ')}" fill="none" ` +
        `stroke="${RED}" stroke-width="1.5"/>`,
    );
  }
  if (minPts.length > 1) {
    lines.push(
      `<polyline class="min-line" points="${minPts.join(' ')}" fill="none" ` +
        `stroke="${BLUE}" stroke-width="1.5"/>`,
    );
  }
  return (
    `<svg class="provenance" xmlns="http://www.w3.org/2000/svg" ` +
    `width="${px(Math.max(width, 80))}" height="${px(layout.height)}" ` +
    `viewBox="0 0 ${px(Math.max(width, 80))} ${px(layout.height)}">` +
    lines.join('') +
    nodes.join('') +
    '</svg>'
  );
}
