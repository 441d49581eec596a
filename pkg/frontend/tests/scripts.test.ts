import { execFileSync } from "node:child_process";
import { existsSync, mkdtempSync, readFileSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { fileURLToPath } from "node:url";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

// These tests exercise the compiled entry points end to end — `npm test`
// builds first (pretest), so dist/ is current when they run.

function script(name: string): string {
  return fileURLToPath(new URL(`../dist/scripts/${name}.js`, import.meta.url));
}

function fixture(name: string): string {
  return fileURLToPath(new URL(`./fixtures/${name}`, import.meta.url));
}

interface Result {
  code: number;
  stdout: string;
  stderr: string;
}

function runScript(name: string, args: string[]): Result {
  try {
    const stdout = execFileSync(process.execPath, [script(name), ...args], {
      encoding: "utf8",
      stdio: ["ignore", "pipe", "pipe"],
    });
    return { code: 0, stdout, stderr: "" };
  } catch (cause) {
    const failed = cause as { status: number | null; stdout: string; stderr: string };
    return { code: failed.status ?? -1, stdout: failed.stdout ?? "", stderr: failed.stderr ?? "" };
  }
}

let outDir: string;

beforeAll(() => {
  expect(existsSync(script("phase-portrait"))).toBe(true);
  outDir = mkdtempSync(join(tmpdir(), "scripts-"));
});

afterAll(() => {
  rmSync(outDir, { recursive: true, force: true });
});

describe("figure scripts", () => {
  it("phase-portrait renders both models into one figure", () => {
    const out = join(outDir, "portrait.svg");
    const result = runScript("phase-portrait", [
      "--input",
      fixture("linear-traj.csv"),
      "--input",
      fixture("nonlinear-traj.csv"),
      "--output",
      out,
      "--title",
      "Model trajectories",
    ]);
    expect(result.code).toBe(0);
    const svg = readFileSync(out, "utf8");
    expect(svg).toContain("Model trajectories");
    expect(svg.split("<polyline").length - 1).toBe(2);
  });

  it("time-series renders a lift path with its xi curve", () => {
    const out = join(outDir, "series.svg");
    const result = runScript("time-series", [
      "--input",
      fixture("linear-lift.csv"),
      "--output",
      out,
    ]);
    expect(result.code).toBe(0);
    expect(readFileSync(out, "utf8")).toContain(">xi</text>");
  });

  it("transform-arrows draws one arrow per sample pair", () => {
    const out = join(outDir, "arrows.svg");
    const result = runScript("transform-arrows", [
      "--input",
      fixture("linear-traj.csv"),
      "--input",
      fixture("linear-transformed-050.csv"),
      "--output",
      out,
    ]);
    expect(result.code).toBe(0);
    const svg = readFileSync(out, "utf8");
    const rows = readFileSync(fixture("linear-traj.csv"), "utf8").trim().split("\n").length - 1;
    expect(svg.split('class="arrow"').length - 1).toBe(rows);
  });

  it("solution-family overlays every epsilon member", () => {
    const out = join(outDir, "family.svg");
    const result = runScript("solution-family", [
      "--input",
      fixture("linear-traj.csv"),
      "--input",
      fixture("linear-transformed-025.csv"),
      "--input",
      fixture("linear-transformed-050.csv"),
      "--input",
      fixture("linear-transformed-075.csv"),
      "--output",
      out,
    ]);
    expect(result.code).toBe(0);
    expect(readFileSync(out, "utf8").split("<polyline").length - 1).toBe(4);
  });

  it("writes to stdout when --output is omitted", () => {
    const result = runScript("phase-portrait", ["--input", fixture("linear-traj.csv")]);
    expect(result.code).toBe(0);
    expect(result.stdout).toContain("</svg>");
  });

  it("exits 2 with usage when no input is given", () => {
    const result = runScript("time-series", []);
    expect(result.code).toBe(2);
    expect(result.stderr).toContain("usage:");
  });

  it("exits 1 on a schema violation", () => {
    const result = runScript("phase-portrait", ["--input", fixture("bad-header.csv")]);
    expect(result.code).toBe(1);
    expect(result.stderr).toContain("error:");
  });
});
