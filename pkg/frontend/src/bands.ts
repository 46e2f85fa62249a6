import { CsvTable, num, requireColumns } from "./csv.js";
import { PlotSpec } from "./plotspec.js";
import { makeScale, padDomain } from "./scales.js";
import {
  axes,
  HEIGHT,
  MARGIN,
  PALETTE,
  polyline,
  svgDocument,
  text,
  WIDTH,
} from "./svg.js";

interface Band {
  readonly nu: string;
  readonly winding: string;
  readonly points: readonly (readonly [number, number])[];
}

/** Group band rows by index, keeping first-appearance order. */
export function collectBands(table: CsvTable, source: string): Band[] {
  const col = requireColumns(table, source, [
    "nu",
    "k_extended",
    "energy",
    "winding",
  ]);
  const order: string[] = [];
  const grouped = new Map<string, { winding: string; points: [number, number][] }>();
  for (const row of table.rows) {
    const nu = row[col["nu"] as number] ?? "";
    let band = grouped.get(nu);
    if (band === undefined) {
      band = { winding: row[col["winding"] as number] ?? "", points: [] };
      grouped.set(nu, band);
      order.push(nu);
    }
    band.points.push([
      num(row, col["k_extended"] as number),
      num(row, col["energy"] as number),
    ]);
  }
  return order.map((nu) => {
    const band = grouped.get(nu) as { winding: string; points: [number, number][] };
    return { nu, winding: band.winding, points: band.points };
  });
}

export function renderBands(spec: PlotSpec, table: CsvTable): string {
  const bands = collectBands(table, spec.input);
  const allK = bands.flatMap((b) => b.points.map((p) => p[0]));
  const allE = bands.flatMap((b) => b.points.map((p) => p[1]));
  const xScale = makeScale(
    spec.xScale,
    padDomain(spec.xScale, Math.min(...allK), Math.max(...allK)),
    [MARGIN.left, WIDTH - MARGIN.right],
  );
  const yScale = makeScale(
    spec.yScale,
    padDomain(spec.yScale, Math.min(...allE), Math.max(...allE)),
    [HEIGHT - MARGIN.bottom, MARGIN.top],
  );
  const body = axes(xScale, yScale, "k (extended zone)", "energy");
  bands.forEach((band, i) => {
    const color = PALETTE[i % PALETTE.length] as string;
    body.push(
      polyline(
        band.points.map(([k, e]) => [xScale.map(k), yScale.map(e)] as const),
        color,
      ),
    );
    body.push(
      text(
        MARGIN.left + 8,
        MARGIN.top + 16 + 16 * i,
        `nu=${band.nu}: winding ${band.winding}`,
        "start",
        11,
        color,
      ),
    );
  });
  return svgDocument(body, "quasi-particle bands");
}
