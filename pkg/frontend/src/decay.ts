import { CsvTable, num, requireColumns, SchemaMismatchError } from "./csv.js";
import { PlotSpec } from "./plotspec.js";
import { makeScale, padDomain, Scale } from "./scales.js";
import {
  axes,
  circle,
  fmt,
  HEIGHT,
  MARGIN,
  PALETTE,
  polyline,
  svgDocument,
  text,
  WIDTH,
} from "./svg.js";

/** One magnitude sample: largest |coupling| found at each distance. */
export interface DecayPoint {
  readonly distance: number;
  readonly magnitude: number;
}

/** Fitted-model parameters as written by the decay-summary artifact. */
export interface DecayFit {
  readonly model: string;
  readonly c: number;
  readonly beta: number;
  readonly exponent: number;
  readonly rSquared: number;
  readonly classification: string;
}

/**
 * Collapse the coupling table to a per-distance magnitude profile.
 *
 * Rows carry one block entry each, both signs of the offset; the profile
 * takes the max over block entries and signs. Distance zero is the on-site
 * block and is not part of a decay profile, so it is dropped.
 */
export function decayProfile(table: CsvTable, source: string): DecayPoint[] {
  const col = requireColumns(table, source, ["delta_r", "value"]);
  const byDistance = new Map<number, number>();
  for (const row of table.rows) {
    const distance = Math.abs(num(row, col["delta_r"] as number));
    if (distance === 0) continue;
    const magnitude = Math.abs(num(row, col["value"] as number));
    const seen = byDistance.get(distance) ?? 0;
    if (magnitude > seen) {
      byDistance.set(distance, magnitude);
    }
  }
  return [...byDistance.entries()]
    .sort((a, b) => a[0] - b[0])
    .map(([distance, magnitude]) => ({ distance, magnitude }));
}

/** Read the (row-constant) fit parameters out of a decay-summary table. */
export function decayFit(table: CsvTable, source: string): DecayFit {
  const col = requireColumns(table, source, [
    "fitted_model",
    "param_c",
    "param_beta",
    "param_exponent",
    "r_squared",
    "classification",
  ]);
  const row = table.rows[0];
  if (row === undefined) {
    throw new SchemaMismatchError(`${source} has a header but no rows`);
  }
  return {
    model: row[col["fitted_model"] as number] ?? "",
    c: num(row, col["param_c"] as number),
    beta: num(row, col["param_beta"] as number),
    exponent: num(row, col["param_exponent"] as number),
    rSquared: num(row, col["r_squared"] as number),
    classification: row[col["classification"] as number] ?? "",
  };
}

/** Evaluate the fitted model at one distance, from stored parameters only. */
export function fitValue(fit: DecayFit, distance: number): number {
  if (fit.model === "exponential") {
    return fit.c * Math.exp(-fit.beta * distance);
  }
  return fit.c * distance ** fit.exponent;
}

/**
 * Annotation line naming the fitted model and its headline parameter.
 *
 * Power-law fits report the log-log slope, exponential fits the decay rate;
 * both carry the stored goodness of fit.
 */
export function fitAnnotation(fit: DecayFit): string {
  const r2 = `R^2 ${fit.rSquared.toFixed(6)}`;
  if (fit.model === "exponential") {
    return `fit exponential: decay rate beta ${fit.beta.toFixed(4)}, ${r2}`;
  }
  return `fit ${fit.model}: log-log slope ${fit.exponent.toFixed(4)}, ${r2}`;
}

function sampleCurve(
  fit: DecayFit,
  xScale: Scale,
  yScale: Scale,
  lo: number,
  hi: number,
): [number, number][] {
  const points: [number, number][] = [];
  const steps = 128;
  for (let i = 0; i <= steps; i += 1) {
    const x =
      xScale.kind === "log"
        ? lo * (hi / lo) ** (i / steps)
        : lo + ((hi - lo) * i) / steps;
    const y = fitValue(fit, x);
    if (yScale.kind === "log" && y <= 0) continue;
    points.push([xScale.map(x), yScale.map(y)]);
  }
  return points;
}

export function renderDecay(
  spec: PlotSpec,
  couplings: CsvTable,
  fitTable: CsvTable | undefined,
): string {
  const points = decayProfile(couplings, spec.input);
  const plotted =
    spec.yScale === "log" ? points.filter((p) => p.magnitude > 0) : points;
  if (plotted.length === 0) {
    return svgDocument(
      [text(WIDTH / 2, HEIGHT / 2, "no couplings above zero", "middle")],
      "coupling decay",
    );
  }
  const xs = plotted.map((p) => p.distance);
  const ys = plotted.map((p) => p.magnitude);
  const xScale = makeScale(
    spec.xScale,
    padDomain(spec.xScale, Math.min(...xs), Math.max(...xs)),
    [MARGIN.left, WIDTH - MARGIN.right],
  );
  const yScale = makeScale(
    spec.yScale,
    padDomain(spec.yScale, Math.min(...ys), Math.max(...ys)),
    [HEIGHT - MARGIN.bottom, MARGIN.top],
  );

  const body = axes(xScale, yScale, "distance", "max |coupling|");
  if (fitTable !== undefined) {
    const fit = decayFit(fitTable, spec.fit ?? "fit CSV");
    body.push(
      polyline(
        sampleCurve(fit, xScale, yScale, Math.min(...xs), Math.max(...xs)),
        PALETTE[1] as string,
        1.5,
        "6 3",
      ),
    );
    body.push(
      text(WIDTH - MARGIN.right, MARGIN.top - 8, fitAnnotation(fit), "end", 12),
    );
    body.push(
      text(
        WIDTH - MARGIN.right,
        MARGIN.top + 14,
        `classification: ${fit.classification}`,
        "end",
        11,
        "#555555",
      ),
    );
  }
  for (const p of plotted) {
    body.push(
      circle(xScale.map(p.distance), yScale.map(p.magnitude), 3, PALETTE[0] as string),
    );
  }
  body.push(
    text(
      MARGIN.left + 8,
      HEIGHT - MARGIN.bottom - 10,
      `${plotted.length} distances, peak ${fmt(Math.max(...ys))}`,
      "start",
      11,
      "#555555",
    ),
  );
  return svgDocument(body, "coupling decay");
}
