import { fileURLToPath } from "node:url";
import path from "node:path";
import { describe, expect, it } from "vitest";
import {
  num,
  parseCsv,
  readCsv,
  requireColumns,
  SchemaMismatchError,
} from "../src/csv.js";

const fixtures = fileURLToPath(new URL("fixtures", import.meta.url));

describe("parseCsv", () => {
  it("splits header and rows", () => {
    const table = parseCsv("a,b,c\n1,2,3\n4,5,6\n");
    expect(table.header).toEqual(["a", "b", "c"]);
    expect(table.rows).toEqual([
      ["1", "2", "3"],
      ["4", "5", "6"],
    ]);
  });

  it("tolerates a missing trailing newline", () => {
    const table = parseCsv("x\n7");
    expect(table.rows).toEqual([["7"]]);
  });

  it("rejects empty input", () => {
    expect(() => parseCsv("")).toThrow(SchemaMismatchError);
  });
});

describe("requireColumns", () => {
  it("maps names to positions", () => {
    const table = parseCsv("delta_r,l,lp,value\n1,0,0,0.5\n");
    const col = requireColumns(table, "couplings.csv", ["value", "delta_r"]);
    expect(col).toEqual({ value: 3, delta_r: 0 });
  });

  it("names the missing column in the error", () => {
    const table = parseCsv("delta_r,l,lp\n1,0,0\n");
    expect(() =>
      requireColumns(table, "couplings.csv", ["delta_r", "value"]),
    ).toThrow('couplings.csv is missing column "value"');
  });
});

describe("num", () => {
  it("parses numeric cells and maps blanks to NaN", () => {
    expect(num(["", "-0.5"], 1)).toBe(-0.5);
    expect(num(["", "-0.5"], 0)).toBeNaN();
    expect(num(["", "-0.5"], 7)).toBeNaN();
  });
});

describe("readCsv", () => {
  it("loads the coupling artifact with its documented header", () => {
    const table = readCsv(path.join(fixtures, "critical_couplings.csv"));
    expect(table.header).toEqual(["delta_r", "l", "lp", "value"]);
    expect(table.rows.length).toBe(324);
  });
});
