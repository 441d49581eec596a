/**
 * Shared command-line runner behind the four figure scripts.
 *
 * Exit codes: 0 figure written, 1 bad input data, 2 usage error.
 */

import { writeFileSync } from "node:fs";
import { parseArgs } from "node:util";

import { buildFigure, readInput, type FigureKind } from "./render.js";

export type { FigureKind } from "./render.js";

const INPUT_SHAPES: Record<FigureKind, string> = {
  "phase-portrait": "one or more trajectory CSVs (t,u,v)",
  "time-series": "exactly one trajectory (t,u,v) or lift (t,u,v,xi) CSV",
  "transform-arrows": "a base trajectory CSV followed by one transformed CSV",
  "solution-family": "a base trajectory CSV followed by one or more transformed CSVs",
};

export function usage(kind: FigureKind): string {
  return (
    `usage: ${kind} --input FILE [--input FILE ...] [--output FILE] [--title TEXT]\n` +
    `  inputs: ${INPUT_SHAPES[kind]}\n` +
    `  --output omitted writes the SVG to stdout`
  );
}

interface Io {
  out(text: string): void;
  err(text: string): void;
}

const STDIO: Io = {
  out: (text) => process.stdout.write(text),
  err: (text) => process.stderr.write(text + "\n"),
};

/** Run one figure command; returns the process exit code. */
export function runFigureCli(kind: FigureKind, argv: string[], io: Io = STDIO): number {
  let parsed;
  try {
    parsed = parseArgs({
      args: argv,
      options: {
        input: { type: "string", multiple: true },
        output: { type: "string" },
        title: { type: "string" },
        help: { type: "boolean" },
      },
      allowPositionals: false,
    });
  } catch (cause) {
    io.err(`error: ${(cause as Error).message}`);
    io.err(usage(kind));
    return 2;
  }
  if (parsed.values.help) {
    io.err(usage(kind));
    return 0;
  }
  const inputs = parsed.values.input ?? [];
  if (inputs.length === 0) {
    io.err("error: at least one --input is required");
    io.err(usage(kind));
    return 2;
  }
  let svg: string;
  try {
    const title = parsed.values.title;
    svg = buildFigure(kind, inputs.map(readInput), title === undefined ? {} : { title });
  } catch (cause) {
    if (cause instanceof Error) {
      io.err(`error: ${cause.message}`);
      return 1;
    }
    throw cause;
  }
  const output = parsed.values.output;
  if (output === undefined) {
    io.out(svg);
  } else {
    writeFileSync(output, svg, "utf8");
    io.err(`wrote ${output}`);
  }
  return 0;
}
