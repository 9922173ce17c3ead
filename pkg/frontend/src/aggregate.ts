/**
 * Aggregate View: one R-D bar over every row the active filter matches,
 * drawn on the same scale as the explorer so it reads as "all of the
 * above, combined".
 */

import type { AggregatePayload, WireBar } from './types.js';
import { Scale } from './scale.js';
import { buildBarModel, renderBar } from './bars.js';
import { DEFAULT_LAYOUT, ExplorerLayout } from './explorer.js';

const px = (v: number): string => v.toFixed(2);

export function renderAggregate(
  payload: AggregatePayload,
  scale: Scale,
  layout: ExplorerLayout = DEFAULT_LAYOUT,
): string {
  // Reuse the bar pipeline by dressing the aggregate as a pseudo-level.
  const asBar: WireBar = {
    parameter: '(aggregate)',
    level: 'all matched',
    selected: true,
    available: payload.available,
    stats: payload.stats,
    density: payload.density,
  };
  const barX = 14;
  const model = buildBarModel(asBar, scale, barX, layout.barWidth * 1.4);
  const width = layout.barWidth * 1.4 + 2 * barX;
  return (
    `<svg class="aggregate" xmlns="http://www.w3.org/2000/svg" ` +
    `width="${px(width)}" height="${px(layout.height)}" ` +
    `viewBox="0 0 ${px(width)} ${px(layout.height)}">` +
    `<text class="matched-rows" x="${px(width / 2)}" y="${px(layout.chartTop - 8)}" ` +
    `text-anchor="middle" font-size="12" fill="#1a1a1a">` +
    `${payload.matched_rows} rows</text>` +
    renderBar(model, layout.labelY) +
    '</svg>'
  );
}
