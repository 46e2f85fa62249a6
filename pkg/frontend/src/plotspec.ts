import { AxisScale } from "./scales.js";

export type PlotKind = "decay" | "bands" | "orbits" | "spacetime";

export const PLOT_KINDS: readonly PlotKind[] = [
  "decay",
  "bands",
  "orbits",
  "spacetime",
];

/**
 * Everything needed to turn workbench artifacts into one figure.
 *
 * `input` is the main artifact (a CSV, or a P1 bitmap for spacetime plots);
 * `fit` is the optional decay-summary CSV whose fitted parameters are drawn
 * over the data points. Rendering never recomputes physics: every number in
 * the figure comes from these files.
 */
export interface PlotSpec {
  readonly kind: PlotKind;
  readonly input: string;
  readonly fit?: string;
  readonly xScale: AxisScale;
  readonly yScale: AxisScale;
  readonly out: string;
}

/** Decay magnitudes span decades; everything else reads best on linear axes. */
export function defaultScales(kind: PlotKind): { x: AxisScale; y: AxisScale } {
  if (kind === "decay") {
    return { x: "log", y: "log" };
  }
  return { x: "linear", y: "linear" };
}
