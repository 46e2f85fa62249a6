import { fileURLToPath } from "node:url";
import fs from "node:fs";
import path from "node:path";
import { describe, expect, it } from "vitest";
import { collectBands, renderBands } from "../src/bands.js";
import { parseCsv, readCsv } from "../src/csv.js";
import { renderOrbits } from "../src/orbits.js";
import { PlotSpec } from "../src/plotspec.js";
import { parseP1, renderSpacetime } from "../src/spacetime.js";

const fixtures = fileURLToPath(new URL("fixtures", import.meta.url));

function spec(kind: PlotSpec["kind"], input: string): PlotSpec {
  return {
    kind,
    input: path.join(fixtures, input),
    xScale: "linear",
    yScale: "linear",
    out: "unused.svg",
  };
}

describe("bands figure", () => {
  it("groups rows into bands in first-appearance order", () => {
    const table = parseCsv(
      "nu,k_extended,re_theta,im_theta,energy,winding,n_mult\n" +
        "0,0.0,1,0,0.5,-1,1\n0,0.1,1,0,0.6,-1,1\n1,0.0,1,0,-0.5,1,1\n",
    );
    const bands = collectBands(table, "t.csv");
    expect(bands.map((b) => b.nu)).toEqual(["0", "1"]);
    expect(bands[0]?.points.length).toBe(2);
    expect(bands[1]?.winding).toBe("1");
  });

  it("draws one curve per band and annotates windings", () => {
    const s = spec("bands", "bands.csv");
    const svg = renderBands(s, readCsv(s.input));
    expect((svg.match(/<polyline/g) ?? []).length).toBe(2);
    expect(svg).toContain("nu=0: winding -1");
    expect(svg).toContain("nu=1: winding 1");
  });

  it("names a missing column", () => {
    const table = parseCsv("nu,k_extended,energy\n0,0,0\n");
    expect(() => collectBands(table, "bands.csv")).toThrow(
      'bands.csv is missing column "winding"',
    );
  });
});

describe("orbits figure", () => {
  it("scatters every orbit from the artifact", () => {
    const s = spec("orbits", "orbit_coefficients.csv");
    const table = readCsv(s.input);
    const svg = renderOrbits(s, table);
    expect((svg.match(/<circle/g) ?? []).length).toBe(table.rows.length);
    expect(svg).toContain(`${table.rows.length} orbits`);
  });

  it("names a missing column", () => {
    const table = parseCsv("orbit_id,representative\n0,@0:X\n");
    expect(() => renderOrbits(spec("orbits", "x.csv"), table)).toThrow(
      'is missing column "max_diameter"',
    );
  });
});

describe("spacetime figure", () => {
  it("parses the P1 artifact", () => {
    const content = fs.readFileSync(path.join(fixtures, "spacetime.pbm"), "utf8");
    const bitmap = parseP1(content, "spacetime.pbm");
    expect(bitmap.width).toBe(33);
    expect(bitmap.height).toBe(17);
    expect(bitmap.cells[0]?.filter((b) => b === 1).length).toBe(1);
  });

  it("fills one square per occupied cell", () => {
    const s = spec("spacetime", "spacetime.pbm");
    const content = fs.readFileSync(s.input, "utf8");
    const ones = parseP1(content, s.input)
      .cells.flat()
      .filter((b) => b === 1).length;
    const svg = renderSpacetime(s, content);
    expect((svg.match(/fill="#111111"/g) ?? []).length).toBe(ones);
    expect(svg).toContain(`${ones} occupied`);
  });

  it("rejects non-P1 content", () => {
    expect(() => parseP1("P4\n2 2\n", "img.pbm")).toThrow("not a P1 bitmap");
    expect(() => parseP1("P1\n2 2\n1 0 1\n", "img.pbm")).toThrow(
      "expected 4",
    );
  });
});
