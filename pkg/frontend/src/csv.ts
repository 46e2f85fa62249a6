import fs from "node:fs";

/** Parsed CSV with a header row and string-valued records. */
export interface CsvTable {
  readonly header: readonly string[];
  readonly rows: readonly (readonly string[])[];
}

/** Raised when an input file lacks a column the figure needs. */
export class SchemaMismatchError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "SchemaMismatchError";
  }
}

/**
 * Parse CSV text into a header and rows.
 *
 * The upstream artifact writers emit plain comma-separated values with no
 * quoting or embedded commas, so no quote handling is attempted here.
 */
export function parseCsv(text: string): CsvTable {
  const lines = text.split("\n").filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new SchemaMismatchError("empty CSV: no header row");
  }
  const header = (lines[0] as string).split(",");
  const rows = lines.slice(1).map((line) => line.split(","));
  return { header, rows };
}

export function readCsv(path: string): CsvTable {
  return parseCsv(fs.readFileSync(path, "utf8"));
}

/**
 * Map column names to indices, failing loudly on any that are absent.
 *
 * `source` is the file name used in the error message so the caller can tell
 * which input was malformed.
 */
export function requireColumns(
  table: CsvTable,
  source: string,
  names: readonly string[],
): Record<string, number> {
  const index: Record<string, number> = {};
  for (const name of names) {
    const at = table.header.indexOf(name);
    if (at < 0) {
      throw new SchemaMismatchError(`${source} is missing column "${name}"`);
    }
    index[name] = at;
  }
  return index;
}

/** Numeric field access; blank cells become NaN rather than 0. */
export function num(row: readonly string[], at: number): number {
  const cell = row[at];
  if (cell === undefined || cell === "") {
    return NaN;
  }
  return Number(cell);
}
