import { Scale } from "./scales.js";

export const WIDTH = 640;
export const HEIGHT = 420;
export const MARGIN = { top: 40, right: 24, bottom: 52, left: 72 } as const;

/** Fixed series palette; index wraps for figures with many series. */
export const PALETTE = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
] as const;

/** Pixel coordinate with two decimals; normalises -0.00 away. */
export function px(value: number): string {
  const s = value.toFixed(2);
  return s === "-0.00" ? "0.00" : s;
}

/** Short deterministic label for tick and annotation values. */
export function fmt(value: number): string {
  if (!Number.isFinite(value)) return String(value);
  if (value === 0) return "0";
  const magnitude = Math.abs(value);
  if (magnitude >= 1e4 || magnitude < 1e-3) {
    return value.toExponential(2).replace(/\.?0+e/, "e");
  }
  const s = value.toPrecision(6);
  return s.includes(".") ? s.replace(/\.?0+$/, "") : s;
}

export function escapeText(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function line(
  x1: number,
  y1: number,
  x2: number,
  y2: number,
  stroke: string,
  width = 1,
): string {
  return (
    `<line x1="${px(x1)}" y1="${px(y1)}" x2="${px(x2)}" y2="${px(y2)}"` +
    ` stroke="${stroke}" stroke-width="${width}"/>`
  );
}

export function polyline(
  points: readonly (readonly [number, number])[],
  stroke: string,
  width = 1.5,
  dash = "",
): string {
  const joined = points.map(([x, y]) => `${px(x)},${px(y)}`).join(" ");
  const dashAttr = dash ? ` stroke-dasharray="${dash}"` : "";
  return (
    `<polyline points="${joined}" fill="none" stroke="${stroke}"` +
    ` stroke-width="${width}"${dashAttr}/>`
  );
}

export function circle(cx: number, cy: number, r: number, fill: string): string {
  return `<circle cx="${px(cx)}" cy="${px(cy)}" r="${r}" fill="${fill}"/>`;
}

export function rect(
  x: number,
  y: number,
  w: number,
  h: number,
  fill: string,
): string {
  return `<rect x="${px(x)}" y="${px(y)}" width="${px(w)}" height="${px(h)}" fill="${fill}"/>`;
}

export function text(
  x: number,
  y: number,
  content: string,
  anchor: "start" | "middle" | "end" = "start",
  size = 12,
  fill = "#222222",
): string {
  return (
    `<text x="${px(x)}" y="${px(y)}" text-anchor="${anchor}"` +
    ` font-family="sans-serif" font-size="${size}" fill="${fill}">` +
    `${escapeText(content)}</text>`
  );
}

/** Frame, ticks, tick labels, and axis titles for one x/y scale pair. */
export function axes(
  xScale: Scale,
  yScale: Scale,
  xLabel: string,
  yLabel: string,
): string[] {
  const left = MARGIN.left;
  const right = WIDTH - MARGIN.right;
  const top = MARGIN.top;
  const bottom = HEIGHT - MARGIN.bottom;
  const parts: string[] = [];
  parts.push(line(left, bottom, right, bottom, "#222222"));
  parts.push(line(left, top, left, bottom, "#222222"));
  for (const v of xScale.ticks()) {
    const x = xScale.map(v);
    if (x < left - 0.5 || x > right + 0.5) continue;
    parts.push(line(x, bottom, x, bottom + 5, "#222222"));
    parts.push(text(x, bottom + 18, fmt(v), "middle", 11));
  }
  for (const v of yScale.ticks()) {
    const y = yScale.map(v);
    if (y < top - 0.5 || y > bottom + 0.5) continue;
    parts.push(line(left - 5, y, left, y, "#222222"));
    parts.push(text(left - 8, y + 4, fmt(v), "end", 11));
  }
  parts.push(text((left + right) / 2, HEIGHT - 12, xLabel, "middle"));
  const yx = 18;
  const yy = (top + bottom) / 2;
  parts.push(
    `<text x="${px(yx)}" y="${px(yy)}" text-anchor="middle"` +
      ` font-family="sans-serif" font-size="12" fill="#222222"` +
      ` transform="rotate(-90 ${px(yx)} ${px(yy)})">${escapeText(yLabel)}</text>`,
  );
  return parts;
}

/** Wrap figure body in a standalone SVG document. */
export function svgDocument(body: readonly string[], title: string): string {
  const head =
    `<?xml version="1.0" encoding="UTF-8"?>\n` +
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}"` +
    ` viewBox="0 0 ${WIDTH} ${HEIGHT}">\n`;
  const background = rect(0, 0, WIDTH, HEIGHT, "#ffffff");
  const heading = text(WIDTH / 2, 24, title, "middle", 14);
  return head + [background, heading, ...body].join("\n") + "\n</svg>\n";
}
