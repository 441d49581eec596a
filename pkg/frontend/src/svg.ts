/**
 * Minimal SVG construction helpers — enough to lay out line charts of
 * trajectory data without pulling in a rendering dependency.
 */

// ─────────────────────────────────────────────────────────────────────────────
// Scales
// ─────────────────────────────────────────────────────────────────────────────

export interface LinearScale {
  (value: number): number;
  readonly domain: readonly [number, number];
  readonly range: readonly [number, number];
}

/** Affine map from a data domain onto a pixel range. */
export function linearScale(
  domain: readonly [number, number],
  range: readonly [number, number],
): LinearScale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0;
  // A degenerate domain maps everything to the middle of the range.
  const scale = ((value: number): number =>
    span === 0 ? (r0 + r1) / 2 : r0 + ((value - d0) / span) * (r1 - r0)) as LinearScale;
  Object.defineProperty(scale, "domain", { value: [d0, d1] });
  Object.defineProperty(scale, "range", { value: [r0, r1] });
  return scale;
}

/** Data extent padded by a fraction on each side so curves clear the frame. */
export function paddedExtent(values: readonly number[], pad = 0.08): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const value of values) {
    if (value < lo) lo = value;
    if (value > hi) hi = value;
  }
  if (!Number.isFinite(lo) || !Number.isFinite(hi)) {
    throw new Error("cannot compute extent of an empty value list");
  }
  const span = hi - lo || Math.abs(hi) || 1;
  return [lo - pad * span, hi + pad * span];
}

// ─────────────────────────────────────────────────────────────────────────────
// Geometry
// ─────────────────────────────────────────────────────────────────────────────

/** Round to 2 decimals — keeps the SVG text compact and diff-friendly. */
export function px(value: number): string {
  const rounded = Math.round(value * 100) / 100;
  // Normalize -0 so output is stable across platforms.
  return (Object.is(rounded, -0) ? 0 : rounded).toString();
}

/** Build the points attribute of a polyline from paired coordinates. */
export function polylinePoints(xs: readonly number[], ys: readonly number[]): string {
  if (xs.length !== ys.length) {
    throw new Error(`coordinate count mismatch: ${xs.length} x values, ${ys.length} y values`);
  }
  const parts: string[] = [];
  for (let i = 0; i < xs.length; i++) {
    parts.push(`${px(xs[i]!)},${px(ys[i]!)}`);
  }
  return parts.join(" ");
}

// ─────────────────────────────────────────────────────────────────────────────
// Elements
// ─────────────────────────────────────────────────────────────────────────────

export function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function polyline(points: string, stroke: string, width = 1.5, dash = ""): string {
  const dashAttr = dash ? ` stroke-dasharray="${dash}"` : "";
  return `<polyline points="${points}" fill="none" stroke="${stroke}" stroke-width="${width}"${dashAttr}/>`;
}

export function circle(cx: number, cy: number, r: number, fill: string): string {
  return `<circle cx="${px(cx)}" cy="${px(cy)}" r="${px(r)}" fill="${fill}"/>`;
}

export function text(
  x: number,
  y: number,
  content: string,
  anchor: "start" | "middle" | "end" = "start",
  size = 12,
): string {
  return (
    `<text x="${px(x)}" y="${px(y)}" text-anchor="${anchor}" ` +
    `font-family="sans-serif" font-size="${size}">${escapeXml(content)}</text>`
  );
}

/**
 * Dashed arrow from (x1, y1) to (x2, y2) with a solid triangular head.
 * The group carries class="arrow" so tests can count rendered arrows.
 */
export function dashedArrow(
  x1: number,
  y1: number,
  x2: number,
  y2: number,
  stroke: string,
): string {
  const dx = x2 - x1;
  const dy = y2 - y1;
  const length = Math.hypot(dx, dy);
  if (length < 1e-9) {
    // Degenerate arrow — mark the point instead of drawing a zero-length head.
    return `<g class="arrow">${circle(x2, y2, 1.5, stroke)}</g>`;
  }
  const ux = dx / length;
  const uy = dy / length;
  const head = Math.min(6, length / 2);
  // Shaft stops where the head begins.
  const bx = x2 - head * ux;
  const by = y2 - head * uy;
  const leftX = bx - (head / 2) * uy;
  const leftY = by + (head / 2) * ux;
  const rightX = bx + (head / 2) * uy;
  const rightY = by - (head / 2) * ux;
  const shaft =
    `<line x1="${px(x1)}" y1="${px(y1)}" x2="${px(bx)}" y2="${px(by)}" ` +
    `stroke="${stroke}" stroke-width="1" stroke-dasharray="3 3"/>`;
  const tip =
    `<polygon points="${px(x2)},${px(y2)} ${px(leftX)},${px(leftY)} ${px(rightX)},${px(rightY)}" ` +
    `fill="${stroke}"/>`;
  return `<g class="arrow">${shaft}${tip}</g>`;
}

// ─────────────────────────────────────────────────────────────────────────────
// Axes and document
// ─────────────────────────────────────────────────────────────────────────────

export interface Frame {
  width: number;
  height: number;
  margin: { top: number; right: number; bottom: number; left: number };
}

export const DEFAULT_FRAME: Frame = {
  width: 640,
  height: 480,
  margin: { top: 40, right: 20, bottom: 48, left: 56 },
};

/** Round tick positions covering the scale's domain. */
export function ticks(domain: readonly [number, number], count = 5): number[] {
  const [lo, hi] = domain;
  const span = hi - lo;
  if (span <= 0) return [lo];
  const rawStep = span / count;
  const magnitude = Math.pow(10, Math.floor(Math.log10(rawStep)));
  const residual = rawStep / magnitude;
  // Round the residual to 1, 2, 5, or 10 at the geometric midpoints.
  const step =
    (residual >= Math.sqrt(50) ? 10 : residual >= Math.sqrt(10) ? 5 : residual >= Math.sqrt(2) ? 2 : 1) *
    magnitude;
  const out: number[] = [];
  for (let value = Math.ceil(lo / step) * step; value <= hi + 1e-12 * span; value += step) {
    // Snap to the step grid to avoid 0.30000000000000004-style labels.
    out.push(Math.round(value / step) * step);
  }
  return out;
}

function formatTick(value: number): string {
  if (value === 0) return "0";
  const abs = Math.abs(value);
  if (abs >= 1000 || abs < 0.01) return value.toExponential(1);
  return parseFloat(value.toPrecision(4)).toString();
}

/** Axis lines, ticks, tick labels, and axis titles for one frame. */
export function axes(
  xScale: LinearScale,
  yScale: LinearScale,
  frame: Frame,
  xLabel: string,
  yLabel: string,
): string {
  const { width, height, margin } = frame;
  const bottom = height - margin.bottom;
  const parts: string[] = [];
  parts.push(
    `<line x1="${px(margin.left)}" y1="${px(bottom)}" x2="${px(width - margin.right)}" ` +
      `y2="${px(bottom)}" stroke="#333" stroke-width="1"/>`,
  );
  parts.push(
    `<line x1="${px(margin.left)}" y1="${px(margin.top)}" x2="${px(margin.left)}" ` +
      `y2="${px(bottom)}" stroke="#333" stroke-width="1"/>`,
  );
  for (const tick of ticks(xScale.domain)) {
    const x = xScale(tick);
    parts.push(
      `<line x1="${px(x)}" y1="${px(bottom)}" x2="${px(x)}" y2="${px(bottom + 4)}" ` +
        `stroke="#333" stroke-width="1"/>`,
    );
    parts.push(text(x, bottom + 18, formatTick(tick), "middle", 11));
  }
  for (const tick of ticks(yScale.domain)) {
    const y = yScale(tick);
    parts.push(
      `<line x1="${px(margin.left - 4)}" y1="${px(y)}" x2="${px(margin.left)}" y2="${px(y)}" ` +
        `stroke="#333" stroke-width="1"/>`,
    );
    parts.push(text(margin.left - 8, y + 4, formatTick(tick), "end", 11));
  }
  const xMid = (margin.left + width - margin.right) / 2;
  parts.push(text(xMid, height - 10, xLabel, "middle"));
  const yMid = (margin.top + bottom) / 2;
  parts.push(
    `<text x="14" y="${px(yMid)}" text-anchor="middle" font-family="sans-serif" ` +
      `font-size="12" transform="rotate(-90 14 ${px(yMid)})">${escapeXml(yLabel)}</text>`,
  );
  return parts.join("\n");
}

/** Wrap body markup in a complete standalone SVG document. */
export function svgDocument(frame: Frame, title: string, body: string): string {
  const { width, height } = frame;
  const heading = title ? text(width / 2, 24, title, "middle", 15) : "";
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
    `viewBox="0 0 ${width} ${height}">\n` +
    `<rect width="${width}" height="${height}" fill="white"/>\n` +
    `${heading}\n${body}\n</svg>\n`
  );
}
