/**
 * R-D bar construction and rendering.
 *
 * A bar is the per-level unit of the explorer: stacked percentile bands
 * in a gray ramp between min and max, a magenta half-violin for the
 * density, and a mean marker. Everything here is pure: wire payload in,
 * view model / SVG string out, so the same code path feeds the browser
 * and the snapshot tests.
 */

import type { WireBar, WireStats, WireDensity } from './types.js';
import { Scale, yFor } from './scale.js';

export interface Band {
  /** value at the upper boundary (larger target value) */
  hiValue: number;
  loValue: number;
  topY: number;
  bottomY: number;
  color: string;
}

export interface BarViewModel {
  parameter: string;
  level: string;
  selected: boolean;
  available: boolean;
  x: number;
  width: number;
  labelColor: string;
  bands: Band[];
  /** mean marker y, present when the level has rows */
  meanY: number | null;
  /** single-dot y when the level is constant-valued */
  dotY: number | null;
  /** half-violin outline, empty when no density was sent */
  violin: Array<{ x: number; y: number }>;
}

// Light at the extremes, dark at the median: a 5-step neutral ramp.
const GRAY_RAMP = ['#ececec', '#cfcfcf', '#ababab', '#858585', '#5c5c5c'];
const MAGENTA = '#c2187e';
const RED = '#c62828';
const BLACK = '#1a1a1a';
const MEAN_COLOR = '#ffffff';

function shadeFor(bandIndex: number, bandCount: number): string {
  // 0 at the outermost band, 1 at the band(s) touching the median.
  const mid = (bandCount - 1) / 2;
  const closeness = 1 - Math.abs(bandIndex - mid) / (mid || 1);
  const idx = Math.round(closeness * (GRAY_RAMP.length - 1));
  return GRAY_RAMP[Math.max(0, Math.min(GRAY_RAMP.length - 1, idx))]!;
}

/**
 * Stack the band boundaries exactly as the service sent them:
 * min, each percentile in cut order, max. No sorting happens here, so a
 * violated ordering in the payload would be visible on screen.
 */
export function bandBoundaries(stats: WireStats): number[] {
  if (stats.count === 0) return [];
  return [stats.min!, ...(stats.percentile_values ?? []), stats.max!];
}

function buildBands(stats: WireStats, scale: Scale): Band[] {
  const bounds = bandBoundaries(stats);
  const bands: Band[] = [];
  for (let i = 0; i + 1 < bounds.length; i++) {
    const lo = bounds[i]!;
    const hi = bounds[i + 1]!;
    bands.push({
      loValue: lo,
      hiValue: hi,
      topY: yFor(scale, hi),
      bottomY: yFor(scale, lo),
      color: shadeFor(i, bounds.length - 1),
    });
  }
  return bands;
}

function buildViolin(
  density: WireDensity | null,
  scale: Scale,
  spineX: number,
  maxWidth: number,
): Array<{ x: number; y: number }> {
  if (density === null || density.positions.length < 2) return [];
  const peak = Math.max(...density.densities);
  if (peak <= 0) return [];
  const pts = density.positions.map((pos, i) => ({
    x: spineX + (density.densities[i]! / peak) * maxWidth,
    y: yFor(scale, pos),
  }));
  // Close the outline back along the spine.
  return [
    { x: spineX, y: pts[0]!.y },
    ...pts,
    { x: spineX, y: pts[pts.length - 1]!.y },
  ];
}

export function buildBarModel(
  bar: WireBar,
  scale: Scale,
  x: number,
  width: number,
): BarViewModel {
  const active = bar.available && bar.selected;
  const hasRows = bar.stats.count > 0;
  const constant = hasRows && bar.stats.range === 0;
  const bodyWidth = width * 0.55;
  return {
    parameter: bar.parameter,
    level: bar.level,
    selected: bar.selected,
    available: bar.available,
    x,
    width,
    labelColor: active ? BLACK : RED,
    bands: bar.available && hasRows && !constant ? buildBands(bar.stats, scale) : [],
    meanY: hasRows && bar.available ? yFor(scale, bar.stats.mean!) : null,
    dotY: constant && bar.available ? yFor(scale, bar.stats.min!) : null,
    violin:
      bar.available && !constant
        ? buildViolin(bar.density, scale, x + bodyWidth, width * 0.4)
        : [],
  };
}

const px = (v: number): string => v.toFixed(2);

export function escapeXml(s: string): string {
  return s
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}

/**
 * Render one bar as an SVG group. The group carries data attributes so
 * the app can dispatch label clicks without any per-bar listeners.
 */
export function renderBar(model: BarViewModel, labelY: number): string {
  const parts: string[] = [];
  const attrs =
    `data-parameter="${escapeXml(model.parameter)}" ` +
    `data-level="${escapeXml(model.level)}"`;
  parts.push(`<g class="bar" ${attrs}>`);
  const bodyWidth = model.width * 0.55;
  for (const band of model.bands) {
    parts.push(
      `<rect x="${px(model.x)}" y="${px(band.topY)}" ` +
        `width="${px(bodyWidth)}" height="${px(band.bottomY - band.topY)}" ` +
        `fill="${band.color}"/>`,
    );
  }
  if (model.violin.length > 0) {
    const pts = model.violin.map((p) => `${px(p.x)},${px(p.y)}`).join(' ');
    parts.push(
      `<polygon class="violin" points="${pts}" fill="${MAGENTA}" ` +
        `fill-opacity="0.35" stroke="${MAGENTA}" stroke-width="1"/>`,
    );
  }
  if (model.dotY !== null) {
    parts.push(
      `<circle class="constant-dot" cx="${px(model.x + bodyWidth / 2)}" ` +
        `cy="${px(model.dotY)}" r="3.5" fill="${BLACK}"/>`,
    );
  }
  if (model.meanY !== null && model.dotY === null) {
    parts.push(
      `<line class="mean" x1="${px(model.x)}" y1="${px(model.meanY)}" ` +
        `x2="${px(model.x + bodyWidth)}" y2="${px(model.meanY)}" ` +
        `stroke="${MEAN_COLOR}" stroke-width="1.5"/>`,
    );
  }
  parts.push(
    `<text class="level-label" x="${px(model.x + model.width / 2)}" ` +
      `y="${px(labelY)}" text-anchor="middle" font-size="11" ` +
      `fill="${model.labelColor}">${escapeXml(model.level)}</text>`,
  );
  parts.push('</g>');
  return parts.join('');
}
