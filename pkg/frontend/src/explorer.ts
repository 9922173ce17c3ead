/**
 * Parameter Explorer: every parameter's levels as R-D bars on one
 * shared target axis, each parameter boxed with its toggle button.
 */

import type { ExplorerPayload } from './types.js';
import { Scale, makeScale, yFor, ticks } from './scale.js';
import { buildBarModel, renderBar, escapeXml } from './bars.js';

export interface ExplorerLayout {
  barWidth: number;
  barGap: number;
  groupGap: number;
  axisWidth: number;
  chartTop: number;
  chartBottom: number;
  labelY: number;
  height: number;
}

export const DEFAULT_LAYOUT: ExplorerLayout = {
  barWidth: 46,
  barGap: 6,
  groupGap: 18,
  axisWidth: 54,
  chartTop: 30,
  chartBottom: 250,
  labelY: 268,
  height: 290,
};

const BOX_BLUE = '#3a6ea5';
const px = (v: number): string => v.toFixed(2);

/**
 * Build the shared scale from the explorer's target axis. The axis is
 * the sampled dataset's full range, so narrowing a filter never
 * rescales the screen out from under the analyst.
 */
export function scaleFromAxis(
  payload: ExplorerPayload,
  layout: ExplorerLayout = DEFAULT_LAYOUT,
): Scale {
  const { min, max } = payload.target_axis;
  return makeScale(min ?? 0, max ?? 1, layout.chartTop, layout.chartBottom);
}

function renderAxis(scale: Scale, layout: ExplorerLayout): string {
  const parts: string[] = [];
  const x = layout.axisWidth - 6;
  parts.push(
    `<line x1="${px(x)}" y1="${px(layout.chartTop)}" x2="${px(x)}" ` +
      `y2="${px(layout.chartBottom)}" stroke="#444" stroke-width="1"/>`,
  );
  for (const t of ticks(scale)) {
    const y = yFor(scale, t);
    parts.push(
      `<line x1="${px(x - 4)}" y1="${px(y)}" x2="${px(x)}" y2="${px(y)}" ` +
        `stroke="#444" stroke-width="1"/>`,
      `<text x="${px(x - 7)}" y="${px(y + 3.5)}" text-anchor="end" ` +
        `font-size="10" fill="#444">${t}</text>`,
    );
  }
  return parts.join('');
}

/**
 * Render the whole explorer. The SVG grows horizontally with the level
 * count (scroll, don't thin): bar width is constant by design.
 */
export function renderExplorer(
  payload: ExplorerPayload,
  scale?: Scale,
  layout: ExplorerLayout = DEFAULT_LAYOUT,
): string {
  const s = scale ?? scaleFromAxis(payload, layout);
  const groups: string[] = [];
  let cursor = layout.axisWidth + 8;
  for (const group of payload.parameters) {
    const inner: string[] = [];
    const boxLeft = cursor;
    cursor += layout.barGap;
    for (const bar of group.levels) {
      const model = buildBarModel(bar, s, cursor, layout.barWidth);
      inner.push(renderBar(model, layout.labelY));
      cursor += layout.barWidth + layout.barGap;
    }
    const boxRight = cursor;
    const title = group.enabled ? group.name : `${group.name} (off)`;
    groups.push(
      `<g class="parameter-group" data-parameter="${escapeXml(group.name)}">` +
        `<rect class="group-box" x="${px(boxLeft)}" y="${px(layout.chartTop - 22)}" ` +
        `width="${px(boxRight - boxLeft)}" height="${px(layout.labelY - layout.chartTop + 34)}" ` +
        `fill="none" stroke="${BOX_BLUE}" stroke-width="1.5"/>` +
        `<text class="parameter-toggle" data-parameter="${escapeXml(group.name)}" ` +
        `x="${px(boxLeft + 6)}" y="${px(layout.chartTop - 8)}" font-size="12" ` +
        `fill="${group.enabled ? BOX_BLUE : '#c62828'}">${escapeXml(title)}</text>` +
        inner.join('') +
        '</g>',
    );
    cursor += layout.groupGap;
  }
  const width = Math.max(cursor, layout.axisWidth + 40);
  return (
    `<svg class="explorer" xmlns="http://www.w3.org/2000/svg" ` +
    `width="${px(width)}" height="${px(layout.height)}" ` +
    `viewBox="0 0 ${px(width)} ${px(layout.height)}">` +
    renderAxis(s, layout) +
    groups.join('') +
    '</svg>'
  );
}
