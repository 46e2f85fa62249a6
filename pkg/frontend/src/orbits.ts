import { CsvTable, num, requireColumns } from "./csv.js";
import { PlotSpec } from "./plotspec.js";
import { makeScale, padDomain } from "./scales.js";
import {
  axes,
  circle,
  HEIGHT,
  MARGIN,
  PALETTE,
  svgDocument,
  text,
  WIDTH,
} from "./svg.js";

/**
 * Scatter of orbit-averaged coefficient magnitude against orbit diameter.
 *
 * This is the figure that shows whether far orbits stay as heavy as near
 * ones; the numbers come straight from the orbit-coefficient artifact.
 */
export function renderOrbits(spec: PlotSpec, table: CsvTable): string {
  const col = requireColumns(table, spec.input, ["max_diameter", "coeff_mean"]);
  const points = table.rows.map(
    (row) =>
      [
        num(row, col["max_diameter"] as number),
        Math.abs(num(row, col["coeff_mean"] as number)),
      ] as const,
  );
  const plotted =
    spec.yScale === "log" ? points.filter((p) => p[1] > 0) : points;
  if (plotted.length === 0) {
    return svgDocument(
      [text(WIDTH / 2, HEIGHT / 2, "no orbits to plot", "middle")],
      "orbit coefficients",
    );
  }
  const xs = plotted.map((p) => p[0]);
  const ys = plotted.map((p) => p[1]);
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
  const body = axes(xScale, yScale, "orbit diameter", "|mean coefficient|");
  for (const [d, c] of plotted) {
    body.push(circle(xScale.map(d), yScale.map(c), 3, PALETTE[0] as string));
  }
  body.push(
    text(
      WIDTH - MARGIN.right,
      MARGIN.top - 8,
      `${plotted.length} orbits`,
      "end",
      11,
      "#555555",
    ),
  );
  return svgDocument(body, "orbit coefficients");
}
