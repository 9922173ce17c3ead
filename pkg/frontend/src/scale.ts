/**
 * Vertical target-axis scale shared by every bar on screen.
 *
 * One scale object is built from the explorer's target_axis and reused
 * for the explorer, the aggregate bar, and the provenance strip, which
 * is what keeps all bars visually comparable. Zoom and pan mutate the
 * domain only; the pixel range is fixed by the layout.
 */

export interface Scale {
  domainMin: number;
  domainMax: number;
  /** pixel y of domainMax (top edge) */
  rangeTop: number;
  /** pixel y of domainMin (bottom edge) */
  rangeBottom: number;
}

export function makeScale(
  domainMin: number,
  domainMax: number,
  rangeTop: number,
  rangeBottom: number,
): Scale {
  if (!Number.isFinite(domainMin) || !Number.isFinite(domainMax)) {
    throw new Error('scale domain must be finite');
  }
  if (rangeBottom <= rangeTop) {
    throw new Error('rangeBottom must sit below rangeTop in pixel space');
  }
  // A constant target still needs a drawable axis; pad it symmetrically.
  if (domainMax <= domainMin) {
    const pad = domainMin === 0 ? 1 : Math.abs(domainMin) * 0.05;
    domainMin -= pad;
    domainMax += pad;
  }
  return { domainMin, domainMax, rangeTop, rangeBottom };
}

/** Larger values map to smaller y (up the screen). */
export function yFor(scale: Scale, value: number): number {
  const t = (value - scale.domainMin) / (scale.domainMax - scale.domainMin);
  return scale.rangeBottom - t * (scale.rangeBottom - scale.rangeTop);
}

/**
 * Zoom about a focus value. factor > 1 zooms in (narrower domain),
 * factor < 1 zooms out.
 */
export function zoom(scale: Scale, focusValue: number, factor: number): Scale {
  if (factor <= 0) throw new Error('zoom factor must be positive');
  const lo = focusValue - (focusValue - scale.domainMin) / factor;
  const hi = focusValue + (scale.domainMax - focusValue) / factor;
  return { ...scale, domainMin: lo, domainMax: hi };
}

/** Shift the domain by a value-space delta (drag to pan). */
export function pan(scale: Scale, deltaValue: number): Scale {
  return {
    ...scale,
    domainMin: scale.domainMin + deltaValue,
    domainMax: scale.domainMax + deltaValue,
  };
}

/** Round tick positions for the axis: 5ish ticks at a tidy step. */
export function ticks(scale: Scale, count = 5): number[] {
  const span = scale.domainMax - scale.domainMin;
  const rawStep = span / Math.max(1, count);
  const power = Math.pow(10, Math.floor(Math.log10(rawStep)));
  const candidates = [1, 2, 2.5, 5, 10].map((m) => m * power);
  const step = candidates.find((s) => span / s <= count + 1) ?? candidates[4]!;
  const first = Math.ceil(scale.domainMin / step) * step;
  const out: number[] = [];
  for (let v = first; v <= scale.domainMax + 1e-9; v += step) {
    out.push(Number(v.toPrecision(12)));
  }
  return out;
}
