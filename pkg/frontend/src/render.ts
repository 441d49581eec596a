/**
 * File-level rendering — a FigureSpec names the input CSVs, the figure kind,
 * and the output path; render() reads, builds, and writes.
 */

import { readFileSync, writeFileSync } from "node:fs";

import {
  CsvSchemaError,
  parseLift,
  parseTrajectory,
  parseTransformed,
  type LiftPath,
  type Trajectory,
  type TransformedPath,
} from "./csv.js";
import {
  type FigureOptions,
  phasePortrait,
  solutionFamily,
  timeSeries,
  transformArrows,
} from "./figures.js";

export type FigureKind = "phase-portrait" | "time-series" | "transform-arrows" | "solution-family";

export interface FigureSpec {
  kind: FigureKind;
  /** CSV paths in the order the figure kind expects (base first, if any). */
  inputs: string[];
  output: string;
  title?: string;
  labels?: readonly [string, string];
}

/** Build a figure of the given kind from raw CSV text, dispatching per kind. */
export function buildFigure(kind: FigureKind, texts: readonly string[], options: FigureOptions = {}): string {
  switch (kind) {
    case "phase-portrait":
      return phasePortrait(texts.map(parseTrajectory), options);
    case "time-series": {
      if (texts.length !== 1) {
        throw new CsvSchemaError(`time-series takes exactly one input, got ${texts.length}`);
      }
      let curve: Trajectory | LiftPath;
      try {
        curve = parseTrajectory(texts[0]!);
      } catch {
        curve = parseLift(texts[0]!);
      }
      return timeSeries(curve, options);
    }
    case "transform-arrows": {
      if (texts.length !== 2) {
        throw new CsvSchemaError(
          `transform-arrows takes a base and a transformed input, got ${texts.length}`,
        );
      }
      return transformArrows(parseTrajectory(texts[0]!), parseTransformed(texts[1]!), options);
    }
    case "solution-family": {
      if (texts.length < 2) {
        throw new CsvSchemaError(
          `solution-family takes a base plus at least one transformed input, got ${texts.length}`,
        );
      }
      const base = parseTrajectory(texts[0]!);
      const members: TransformedPath[] = texts.slice(1).map(parseTransformed);
      return solutionFamily(base, members, options);
    }
  }
}

export function readInput(path: string): string {
  try {
    return readFileSync(path, "utf8");
  } catch (cause) {
    throw new CsvSchemaError(`cannot read '${path}': ${(cause as Error).message}`);
  }
}

/** Read the named inputs, build the figure, and write it to the output path. */
export function render(spec: FigureSpec): void {
  const options: FigureOptions = {};
  if (spec.title !== undefined) options.title = spec.title;
  if (spec.labels !== undefined) options.labels = spec.labels;
  const svg = buildFigure(spec.kind, spec.inputs.map(readInput), options);
  writeFileSync(spec.output, svg, "utf8");
}
