/**
 * Readers for the three CSV schemas emitted by the phasesym CLI.
 *
 * Trajectory:  t,u,v                              (flow command)
 * Lift path:   t,u,v,xi                           (lift command)
 * Transformed: t_hat,u_hat,v_hat,epsilon,source_t (transform command)
 *
 * Schema violations raise CsvSchemaError naming the offending column.
 */

export const TRAJECTORY_COLUMNS = ["t", "u", "v"] as const;
export const LIFT_COLUMNS = ["t", "u", "v", "xi"] as const;
export const TRANSFORMED_COLUMNS = [
  "t_hat",
  "u_hat",
  "v_hat",
  "epsilon",
  "source_t",
] as const;

export interface Trajectory {
  kind: "trajectory";
  t: number[];
  u: number[];
  v: number[];
}

export interface LiftPath {
  kind: "lift";
  t: number[];
  u: number[];
  v: number[];
  xi: number[];
}

export interface TransformedPath {
  kind: "transformed";
  tHat: number[];
  uHat: number[];
  vHat: number[];
  epsilon: number;
  sourceT: number[];
}

export type CsvData = Trajectory | LiftPath | TransformedPath;

export class CsvSchemaError extends Error {
  readonly column: string | null;
  readonly line: number | null;

  constructor(message: string, column: string | null = null, line: number | null = null) {
    super(message);
    this.name = "CsvSchemaError";
    this.column = column;
    this.line = line;
  }
}

/** Split CSV text into a non-empty header row plus data rows. */
function splitRows(text: string): { header: string[]; rows: string[][] } {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new CsvSchemaError("empty CSV: no header row");
  }
  const header = lines[0]!.split(",").map((c) => c.trim());
  const rows = lines.slice(1).map((line) => line.split(",").map((c) => c.trim()));
  return { header, rows };
}

/** Check the header against an expected column list, naming the first mismatch. */
function requireHeader(header: string[], expected: readonly string[]): void {
  for (let i = 0; i < expected.length; i++) {
    if (header[i] !== expected[i]) {
      throw new CsvSchemaError(
        `expected column '${expected[i]}' at position ${i}, got '${header[i] ?? "<missing>"}'`,
        expected[i]!,
      );
    }
  }
  if (header.length > expected.length) {
    throw new CsvSchemaError(
      `unexpected extra column '${header[expected.length]}'`,
      header[expected.length]!,
    );
  }
}

/** Parse all rows into per-column float arrays; errors carry column and line. */
function readColumns(rows: string[][], columns: readonly string[]): number[][] {
  if (rows.length === 0) {
    throw new CsvSchemaError("CSV has a header but no data rows");
  }
  const out: number[][] = columns.map(() => []);
  rows.forEach((row, r) => {
    // header is line 1, first data row is line 2
    const line = r + 2;
    if (row.length !== columns.length) {
      throw new CsvSchemaError(
        `expected ${columns.length} values on line ${line}, got ${row.length}`,
        null,
        line,
      );
    }
    columns.forEach((name, c) => {
      const value = Number(row[c]);
      if (row[c] === "" || Number.isNaN(value)) {
        throw new CsvSchemaError(
          `column '${name}' has a non-numeric value '${row[c]}' on line ${line}`,
          name,
          line,
        );
      }
      out[c]!.push(value);
    });
  });
  return out;
}

export function parseTrajectory(text: string): Trajectory {
  const { header, rows } = splitRows(text);
  requireHeader(header, TRAJECTORY_COLUMNS);
  const [t, u, v] = readColumns(rows, TRAJECTORY_COLUMNS);
  return { kind: "trajectory", t: t!, u: u!, v: v! };
}

export function parseLift(text: string): LiftPath {
  const { header, rows } = splitRows(text);
  requireHeader(header, LIFT_COLUMNS);
  const [t, u, v, xi] = readColumns(rows, LIFT_COLUMNS);
  return { kind: "lift", t: t!, u: u!, v: v!, xi: xi! };
}

export function parseTransformed(text: string): TransformedPath {
  const { header, rows } = splitRows(text);
  requireHeader(header, TRANSFORMED_COLUMNS);
  const [tHat, uHat, vHat, epsilon, sourceT] = readColumns(rows, TRANSFORMED_COLUMNS);
  const eps = epsilon![0]!;
  epsilon!.forEach((value, i) => {
    if (value !== eps) {
      throw new CsvSchemaError(
        `column 'epsilon' must be constant; row ${i + 2} has ${value}, expected ${eps}`,
        "epsilon",
        i + 2,
      );
    }
  });
  return { kind: "transformed", tHat: tHat!, uHat: uHat!, vHat: vHat!, epsilon: eps, sourceT: sourceT! };
}

/** Parse any of the three schemas, dispatching on the header row. */
export function parseAny(text: string): CsvData {
  const { header } = splitRows(text);
  const key = header.join(",");
  if (key === TRAJECTORY_COLUMNS.join(",")) return parseTrajectory(text);
  if (key === LIFT_COLUMNS.join(",")) return parseLift(text);
  if (key === TRANSFORMED_COLUMNS.join(",")) return parseTransformed(text);
  throw new CsvSchemaError(
    `unrecognized header '${key}'; expected '${TRAJECTORY_COLUMNS.join(",")}', ` +
      `'${LIFT_COLUMNS.join(",")}', or '${TRANSFORMED_COLUMNS.join(",")}'`,
  );
}
