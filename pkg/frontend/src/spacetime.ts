import { PlotSpec } from "./plotspec.js";
import { HEIGHT, MARGIN, rect, svgDocument, text, WIDTH } from "./svg.js";

export interface Bitmap {
  readonly width: number;
  readonly height: number;
  /** Row-major 0/1 cells, row 0 first. */
  readonly cells: readonly (readonly number[])[];
}

/** Parse a plain-text P1 bitmap. */
export function parseP1(content: string, source: string): Bitmap {
  const tokens = content
    .split("\n")
    .filter((line) => !line.startsWith("#"))
    .join(" ")
    .split(/\s+/)
    .filter((t) => t.length > 0);
  if (tokens[0] !== "P1") {
    throw new Error(`${source} is not a P1 bitmap (magic "${tokens[0] ?? ""}")`);
  }
  const width = Number(tokens[1]);
  const height = Number(tokens[2]);
  const bits = tokens.slice(3).map(Number);
  if (!Number.isInteger(width) || !Number.isInteger(height) || width <= 0 || height <= 0) {
    throw new Error(`${source} has a malformed P1 size header`);
  }
  if (bits.length !== width * height) {
    throw new Error(
      `${source} has ${bits.length} cells, expected ${width * height}`,
    );
  }
  const cells: number[][] = [];
  for (let r = 0; r < height; r += 1) {
    cells.push(bits.slice(r * width, (r + 1) * width));
  }
  return { width, height, cells };
}

/**
 * Spacetime support diagram: one filled square per occupied site, time
 * running downwards as in the bitmap.
 */
export function renderSpacetime(spec: PlotSpec, content: string): string {
  const bitmap = parseP1(content, spec.input);
  const availableW = WIDTH - MARGIN.left - MARGIN.right;
  const availableH = HEIGHT - MARGIN.top - MARGIN.bottom;
  const cell = Math.max(
    2,
    Math.floor(Math.min(availableW / bitmap.width, availableH / bitmap.height)),
  );
  const x0 = MARGIN.left + (availableW - cell * bitmap.width) / 2;
  const y0 = MARGIN.top + (availableH - cell * bitmap.height) / 2;
  const body: string[] = [];
  body.push(
    rect(x0, y0, cell * bitmap.width, cell * bitmap.height, "#f4f4f4"),
  );
  let filled = 0;
  bitmap.cells.forEach((row, r) => {
    row.forEach((bit, c) => {
      if (bit === 1) {
        filled += 1;
        body.push(rect(x0 + c * cell, y0 + r * cell, cell, cell, "#111111"));
      }
    });
  });
  body.push(text((WIDTH + 0) / 2, HEIGHT - 12, "site", "middle"));
  const yy = (y0 + y0 + cell * bitmap.height) / 2;
  body.push(
    `<text x="18.00" y="${yy.toFixed(2)}" text-anchor="middle"` +
      ` font-family="sans-serif" font-size="12" fill="#222222"` +
      ` transform="rotate(-90 18.00 ${yy.toFixed(2)})">step</text>`,
  );
  body.push(
    text(
      WIDTH - MARGIN.right,
      MARGIN.top - 8,
      `${bitmap.width} sites, ${bitmap.height} rows, ${filled} occupied`,
      "end",
      11,
      "#555555",
    ),
  );
  return svgDocument(body, "spacetime support");
}
