import fs from "node:fs";
import path from "node:path";
import { renderBands } from "./bands.js";
import { readCsv } from "./csv.js";
import { renderDecay } from "./decay.js";
import { renderOrbits } from "./orbits.js";
import { PlotSpec } from "./plotspec.js";
import { renderSpacetime } from "./spacetime.js";

/**
 * Produce the SVG text for a plot spec.
 *
 * Pure function of the referenced files: the same inputs always yield
 * byte-identical output.
 */
export function renderSpec(spec: PlotSpec): string {
  switch (spec.kind) {
    case "decay": {
      const couplings = readCsv(spec.input);
      const fit = spec.fit === undefined ? undefined : readCsv(spec.fit);
      return renderDecay(spec, couplings, fit);
    }
    case "bands":
      return renderBands(spec, readCsv(spec.input));
    case "orbits":
      return renderOrbits(spec, readCsv(spec.input));
    case "spacetime":
      return renderSpacetime(spec, fs.readFileSync(spec.input, "utf8"));
  }
}

/** Render and write to `spec.out`, creating parent directories as needed. */
export function renderToFile(spec: PlotSpec): void {
  const svg = renderSpec(spec);
  fs.mkdirSync(path.dirname(path.resolve(spec.out)), { recursive: true });
  fs.writeFileSync(spec.out, svg, "utf8");
}
