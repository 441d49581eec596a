/**
 * Figure builders — each takes parsed CSV data and returns a complete SVG
 * document as a string.
 */

import type { LiftPath, Trajectory, TransformedPath } from "./csv.js";
import {
  DEFAULT_FRAME,
  type Frame,
  axes,
  circle,
  dashedArrow,
  linearScale,
  paddedExtent,
  polyline,
  polylinePoints,
  svgDocument,
  text,
} from "./svg.js";

export interface FigureOptions {
  title?: string;
  /** [x label, y label] — defaults depend on the figure kind. */
  labels?: readonly [string, string];
  frame?: Frame;
}

// Qualitative palette — darkened for legibility on a white background.
export const PALETTE = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#e377c2",
  "#8c564b",
  "#17becf",
  "#bcbd22",
] as const;

export function color(index: number): string {
  return PALETTE[index % PALETTE.length]!;
}

function frameScales(
  frame: Frame,
  xDomain: readonly [number, number],
  yDomain: readonly [number, number],
) {
  const { width, height, margin } = frame;
  const xScale = linearScale(xDomain, [margin.left, width - margin.right]);
  // SVG y grows downward, so the y scale flips its range.
  const yScale = linearScale(yDomain, [height - margin.bottom, margin.top]);
  return { xScale, yScale };
}

// ─────────────────────────────────────────────────────────────────────────────
// Phase portrait — one (u, v) curve per trajectory
// ─────────────────────────────────────────────────────────────────────────────

export function phasePortrait(curves: readonly Trajectory[], options: FigureOptions = {}): string {
  if (curves.length === 0) {
    throw new Error("phase portrait needs at least one trajectory");
  }
  const frame = options.frame ?? DEFAULT_FRAME;
  const [xLabel, yLabel] = options.labels ?? ["u", "v"];
  const xDomain = paddedExtent(curves.flatMap((c) => c.u));
  const yDomain = paddedExtent(curves.flatMap((c) => c.v));
  const { xScale, yScale } = frameScales(frame, xDomain, yDomain);
  const parts: string[] = [axes(xScale, yScale, frame, xLabel, yLabel)];
  curves.forEach((curve, i) => {
    const stroke = color(i);
    parts.push(polyline(polylinePoints(curve.u.map(xScale), curve.v.map(yScale)), stroke));
    // Dot at the initial point shows flow direction without clutter.
    parts.push(circle(xScale(curve.u[0]!), yScale(curve.v[0]!), 3, stroke));
  });
  return svgDocument(frame, options.title ?? "Phase portrait", parts.join("\n"));
}

// ─────────────────────────────────────────────────────────────────────────────
// Time series — u(t) and v(t) on a shared time axis
// ─────────────────────────────────────────────────────────────────────────────

export function timeSeries(curve: Trajectory | LiftPath, options: FigureOptions = {}): string {
  const series: Array<{ label: string; values: number[] }> = [
    { label: "u", values: curve.u },
    { label: "v", values: curve.v },
  ];
  if ("xi" in curve) {
    series.push({ label: "xi", values: curve.xi });
  }
  const frame = options.frame ?? DEFAULT_FRAME;
  const [xLabel, yLabel] = options.labels ?? ["t", series.map((s) => s.label).join(", ")];
  const xDomain = paddedExtent(curve.t, 0.02);
  const yDomain = paddedExtent(series.flatMap((s) => s.values));
  const { xScale, yScale } = frameScales(frame, xDomain, yDomain);
  const parts: string[] = [axes(xScale, yScale, frame, xLabel, yLabel)];
  series.forEach((s, i) => {
    const stroke = color(i);
    parts.push(polyline(polylinePoints(curve.t.map(xScale), s.values.map(yScale)), stroke));
    // Inline label at the curve's right end stands in for a legend box.
    const lastX = xScale(curve.t[curve.t.length - 1]!);
    const lastY = yScale(s.values[s.values.length - 1]!);
    parts.push(text(lastX + 4, lastY + 4, s.label, "start", 11));
  });
  return svgDocument(frame, options.title ?? "Time series", parts.join("\n"));
}

// ─────────────────────────────────────────────────────────────────────────────
// Transform arrows — base curve, its image, and point-to-image arrows
// ─────────────────────────────────────────────────────────────────────────────

/**
 * The transform CSV carries source_t so each transformed row can be traced
 * back to the base sample it came from; rows must match the base curve
 * one-to-one and in order, and we draw exactly one arrow per pair.
 */
export function transformArrows(
  base: Trajectory,
  transformed: TransformedPath,
  options: FigureOptions = {},
): string {
  if (base.t.length !== transformed.sourceT.length) {
    throw new Error(
      `row count mismatch: base has ${base.t.length} samples, ` +
        `transformed has ${transformed.sourceT.length}`,
    );
  }
  for (let i = 0; i < base.t.length; i++) {
    const gap = Math.abs(base.t[i]! - transformed.sourceT[i]!);
    if (gap > 1e-9 * (1 + Math.abs(base.t[i]!))) {
      throw new Error(
        `source_t mismatch on row ${i}: base t = ${base.t[i]}, source_t = ${transformed.sourceT[i]}`,
      );
    }
  }
  const frame = options.frame ?? DEFAULT_FRAME;
  const [xLabel, yLabel] = options.labels ?? ["u", "v"];
  const title = options.title ?? `Symmetry transform (epsilon = ${transformed.epsilon})`;
  const xDomain = paddedExtent([...base.u, ...transformed.uHat]);
  const yDomain = paddedExtent([...base.v, ...transformed.vHat]);
  const { xScale, yScale } = frameScales(frame, xDomain, yDomain);
  const parts: string[] = [axes(xScale, yScale, frame, xLabel, yLabel)];
  const baseColor = color(0);
  const imageColor = color(1);
  for (let i = 0; i < base.t.length; i++) {
    parts.push(
      dashedArrow(
        xScale(base.u[i]!),
        yScale(base.v[i]!),
        xScale(transformed.uHat[i]!),
        yScale(transformed.vHat[i]!),
        "#999",
      ),
    );
  }
  // Curves go on top of the arrows so they stay readable.
  parts.push(polyline(polylinePoints(base.u.map(xScale), base.v.map(yScale)), baseColor, 2));
  parts.push(
    polyline(
      polylinePoints(transformed.uHat.map(xScale), transformed.vHat.map(yScale)),
      imageColor,
      2,
    ),
  );
  parts.push(circle(xScale(base.u[0]!), yScale(base.v[0]!), 3, baseColor));
  parts.push(circle(xScale(transformed.uHat[0]!), yScale(transformed.vHat[0]!), 3, imageColor));
  return svgDocument(frame, title, parts.join("\n"));
}

// ─────────────────────────────────────────────────────────────────────────────
// Solution family — one base curve and its images under several epsilons
// ─────────────────────────────────────────────────────────────────────────────

export function solutionFamily(
  base: Trajectory,
  members: readonly TransformedPath[],
  options: FigureOptions = {},
): string {
  if (members.length === 0) {
    throw new Error("solution family needs at least one transformed curve");
  }
  const frame = options.frame ?? DEFAULT_FRAME;
  const [xLabel, yLabel] = options.labels ?? ["u", "v"];
  const xDomain = paddedExtent([...base.u, ...members.flatMap((m) => m.uHat)]);
  const yDomain = paddedExtent([...base.v, ...members.flatMap((m) => m.vHat)]);
  const { xScale, yScale } = frameScales(frame, xDomain, yDomain);
  const parts: string[] = [axes(xScale, yScale, frame, xLabel, yLabel)];
  parts.push(polyline(polylinePoints(base.u.map(xScale), base.v.map(yScale)), "#333", 2));
  const { width, margin } = frame;
  const legendX = width - margin.right - 8;
  parts.push(text(legendX, margin.top + 12, "epsilon = 0", "end", 11));
  // Sorted by epsilon so colors and legend read in one direction.
  const ordered = [...members].sort((a, b) => a.epsilon - b.epsilon);
  ordered.forEach((member, i) => {
    const stroke = color(i);
    parts.push(polyline(polylinePoints(member.uHat.map(xScale), member.vHat.map(yScale)), stroke));
    parts.push(text(legendX, margin.top + 12 + 14 * (i + 1), `epsilon = ${member.epsilon}`, "end", 11));
  });
  return svgDocument(frame, options.title ?? "Solution family", parts.join("\n"));
}
