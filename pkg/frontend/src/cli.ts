#!/usr/bin/env node
import { pathToFileURL } from "node:url";
import { parseArgs } from "node:util";
import { SchemaMismatchError } from "./csv.js";
import { defaultScales, PlotKind, PLOT_KINDS, PlotSpec } from "./plotspec.js";
import { AxisScale } from "./scales.js";
import { renderToFile } from "./render.js";

export class UsageError extends Error {}

const USAGE =
  "usage: report-plots render --kind <decay|bands|orbits|spacetime>" +
  " --in <artifact> [--fit <summary.csv>] --out <figure.svg>" +
  " [--x-scale <linear|log>] [--y-scale <linear|log>]";

function parseScale(raw: string | undefined, fallback: AxisScale): AxisScale {
  if (raw === undefined) return fallback;
  if (raw === "linear" || raw === "log") return raw;
  throw new UsageError(`unknown axis scale "${raw}" (expected linear or log)`);
}

/** Translate `render ...` argv into a plot spec, validating every flag. */
export function parseRenderArgs(argv: readonly string[]): PlotSpec {
  let parsed;
  try {
    parsed = parseArgs({
      args: [...argv],
      allowPositionals: true,
      options: {
        kind: { type: "string" },
        in: { type: "string" },
        fit: { type: "string" },
        out: { type: "string" },
        "x-scale": { type: "string" },
        "y-scale": { type: "string" },
      },
    });
  } catch (error) {
    throw new UsageError((error as Error).message);
  }
  const { values, positionals } = parsed;
  if (positionals.length !== 1 || positionals[0] !== "render") {
    throw new UsageError(`expected the single command "render"`);
  }
  const kind = values.kind;
  if (kind === undefined || !(PLOT_KINDS as readonly string[]).includes(kind)) {
    throw new UsageError(
      `--kind must be one of ${PLOT_KINDS.join(", ")}, got "${kind ?? ""}"`,
    );
  }
  const input = values.in;
  const out = values.out;
  if (input === undefined) throw new UsageError("--in is required");
  if (out === undefined) throw new UsageError("--out is required");
  if (values.fit !== undefined && kind !== "decay") {
    throw new UsageError("--fit only applies to decay plots");
  }
  const fallback = defaultScales(kind as PlotKind);
  const spec: PlotSpec = {
    kind: kind as PlotKind,
    input,
    out,
    xScale: parseScale(values["x-scale"], fallback.x),
    yScale: parseScale(values["y-scale"], fallback.y),
    ...(values.fit === undefined ? {} : { fit: values.fit }),
  };
  return spec;
}

/** CLI entry point; returns the process exit code instead of exiting. */
export function main(argv: readonly string[]): number {
  let spec: PlotSpec;
  try {
    spec = parseRenderArgs(argv);
  } catch (error) {
    if (error instanceof UsageError) {
      process.stderr.write(`${error.message}\n${USAGE}\n`);
      return 2;
    }
    throw error;
  }
  try {
    renderToFile(spec);
  } catch (error) {
    if (error instanceof SchemaMismatchError) {
      process.stderr.write(`${error.message}\n`);
      return 1;
    }
    if ((error as NodeJS.ErrnoException).code === "ENOENT") {
      process.stderr.write(`${(error as Error).message}\n`);
      return 1;
    }
    if (error instanceof Error && error.message.includes("P1")) {
      process.stderr.write(`${error.message}\n`);
      return 1;
    }
    throw error;
  }
  return 0;
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url === pathToFileURL(process.argv[1]).href;
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
