export type AxisScale = "linear" | "log";

/** Monotone map from data coordinates to pixel coordinates. */
export interface Scale {
  readonly kind: AxisScale;
  readonly domain: readonly [number, number];
  readonly range: readonly [number, number];
  map(value: number): number;
  ticks(): number[];
}

// Tick steps are 1, 2, or 5 times a power of ten so labels stay short.
function niceStep(rawStep: number): number {
  const power = Math.floor(Math.log10(rawStep));
  const base = 10 ** power;
  const mantissa = rawStep / base;
  if (mantissa <= 1) return base;
  if (mantissa <= 2) return 2 * base;
  if (mantissa <= 5) return 5 * base;
  return 10 * base;
}

export function linearScale(
  domain: readonly [number, number],
  range: readonly [number, number],
): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  return {
    kind: "linear",
    domain,
    range,
    map: (value) => r0 + ((value - d0) / span) * (r1 - r0),
    ticks: () => {
      const step = niceStep(Math.abs(span) / 6);
      const lo = Math.min(d0, d1);
      const hi = Math.max(d0, d1);
      const out: number[] = [];
      for (let v = Math.ceil(lo / step) * step; v <= hi + step * 1e-9; v += step) {
        // Snap to the step grid so 0.30000000000000004 prints as 0.3.
        out.push(Number((Math.round(v / step) * step).toPrecision(12)));
      }
      return out;
    },
  };
}

export function logScale(
  domain: readonly [number, number],
  range: readonly [number, number],
): Scale {
  const [d0, d1] = domain;
  if (d0 <= 0 || d1 <= 0) {
    throw new RangeError(`log scale needs a positive domain, got [${d0}, ${d1}]`);
  }
  const [r0, r1] = range;
  const l0 = Math.log10(d0);
  const l1 = Math.log10(d1);
  const span = l1 - l0 || 1;
  return {
    kind: "log",
    domain,
    range,
    map: (value) => r0 + ((Math.log10(value) - l0) / span) * (r1 - r0),
    ticks: () => {
      const lo = Math.min(l0, l1);
      const hi = Math.max(l0, l1);
      const decades: number[] = [];
      for (let e = Math.ceil(lo - 1e-9); e <= hi + 1e-9; e += 1) {
        decades.push(10 ** e);
      }
      if (decades.length >= 2) {
        return decades;
      }
      // Less than one decade of span: fall back to linear ticks.
      return linearScale(domain, range).ticks();
    },
  };
}

export function makeScale(
  kind: AxisScale,
  domain: readonly [number, number],
  range: readonly [number, number],
): Scale {
  return kind === "log" ? logScale(domain, range) : linearScale(domain, range);
}

/**
 * Widen a data extent by a few percent so points do not sit on the frame.
 * Log domains are padded multiplicatively to stay positive.
 */
export function padDomain(
  kind: AxisScale,
  lo: number,
  hi: number,
): [number, number] {
  if (kind === "log") {
    const factor = (hi / lo) ** 0.05 || 1.25;
    return [lo / factor, hi * factor];
  }
  const pad = (hi - lo) * 0.05 || 1;
  return [lo - pad, hi + pad];
}
