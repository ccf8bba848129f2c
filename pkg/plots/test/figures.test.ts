import { test } from "node:test";
import assert from "node:assert/strict";
import { existsSync, mkdtempSync, readFileSync, writeFileSync } from "fs";
import { tmpdir } from "os";
import { join, dirname } from "path";
import { fileURLToPath } from "url";

import { render, FigureKind, OverlayMismatchError, OVERLAY_TOL } from "../src/figures.js";
import { parseCsv, readCsv, SchemaError } from "../src/csv.js";
import { sineTarget, gaussianInverseMoment, slopeThroughOrigin } from "../src/analytic.js";
import { main as cliMain } from "../src/cli.js";

const here = dirname(fileURLToPath(import.meta.url));
const FIXTURES = join(here, "..", "..", "fixtures");
const outDir = mkdtempSync(join(tmpdir(), "wigner-plots-"));

const GOLDEN: Array<{ kind: FigureKind; inputs: string[] }> = [
  { kind: "wegner_linearity", inputs: ["wegner.csv"] },
  { kind: "semicircle", inputs: ["dos.csv"] },
  { kind: "gap_tail", inputs: ["gaps.csv"] },
  { kind: "correlation", inputs: ["corr.csv"] },
  { kind: "deloc", inputs: ["deloc_N100.csv", "deloc_N200.csv"] },
  { kind: "invmom_uniformity", inputs: ["invmom.csv"] },
];

for (const { kind, inputs } of GOLDEN) {
  test(`${kind} renders from its golden fixture`, () => {
    const output = join(outDir, `${kind}.svg`);
    render({ kind, inputs: inputs.map((f) => join(FIXTURES, f)), output });
    const svg = readFileSync(output, "utf8");
    assert.ok(svg.startsWith("<svg"), "output is an SVG document");
    assert.ok(svg.includes("</svg>"), "SVG is closed");
    assert.ok(svg.includes("<circle") || svg.includes("<polyline"), "has chart marks");
    assert.ok(!/\d{4}-\d{2}-\d{2}/.test(svg), "no timestamps in output");
  });
}

test("rendering is pure: same CSV in, same SVG out", () => {
  const a = join(outDir, "pure-a.svg");
  const b = join(outDir, "pure-b.svg");
  render({ kind: "correlation", inputs: [join(FIXTURES, "corr.csv")], output: a });
  render({ kind: "correlation", inputs: [join(FIXTURES, "corr.csv")], output: b });
  assert.equal(readFileSync(a, "utf8"), readFileSync(b, "utf8"));
});

test("correlation overlay matches the sine_target column to 1e-9", () => {
  const table = readCsv(join(FIXTURES, "corr.csv"));
  const s = table.columns.indexOf("s_bin_center");
  const tgt = table.columns.indexOf("sine_target");
  for (const row of table.rows) {
    const mine = sineTarget(row[s] as number);
    assert.ok(Math.abs(mine - (row[tgt] as number)) <= OVERLAY_TOL);
  }
});

test("correlation aborts when sine_target disagrees beyond 1e-9", () => {
  const text = readFileSync(join(FIXTURES, "corr.csv"), "utf8");
  const lines = text.trim().split("\n");
  const cells = lines[1]!.split(",");
  cells[3] = String(Number(cells[3]) + 1e-6);
  lines[1] = cells.join(",");
  const corrupted = join(outDir, "corrupted.csv");
  writeFileSync(corrupted, lines.join("\n") + "\n");
  const output = join(outDir, "should-not-exist.svg");
  assert.throws(
    () => render({ kind: "correlation", inputs: [corrupted], output }),
    OverlayMismatchError,
  );
  assert.ok(!existsSync(output), "no file written on abort");
});

test("schema mismatch names the missing column and writes nothing", () => {
  const bad = join(outDir, "bad-schema.csv");
  writeFileSync(bad, "s_bin_center,R2_estimate,R2_stderr\n0.5,0.6,0.01\n");
  const output = join(outDir, "bad-schema.svg");
  assert.throws(
    () => render({ kind: "correlation", inputs: [bad], output }),
    (err: Error) => err instanceof SchemaError && err.message.includes("sine_target"),
  );
  assert.ok(!existsSync(output));
});

test("empty CSV is an error and no file is written", () => {
  const empty = join(outDir, "empty.csv");
  writeFileSync(empty, "statistic,E,scale,N,K_or_eta,estimate,stderr,trials,seed\n");
  const output = join(outDir, "empty.svg");
  assert.throws(() => render({ kind: "wegner_linearity", inputs: [empty], output }), SchemaError);
  assert.ok(!existsSync(output));
  writeFileSync(empty, "");
  assert.throws(() => render({ kind: "wegner_linearity", inputs: [empty], output }), SchemaError);
});

test("csv parser handles numbers, nan, and strings", () => {
  const t = parseCsv("a,b,c\n1.5,nan,gaussian\n-2,inf,x\n");
  assert.deepEqual(t.columns, ["a", "b", "c"]);
  assert.equal(t.rows[0]![0], 1.5);
  assert.ok(Number.isNaN(t.rows[0]![1] as number));
  assert.equal(t.rows[0]![2], "gaussian");
  assert.equal(t.rows[1]![1], Infinity);
  assert.throws(() => parseCsv("a,b\n1\n"), SchemaError);
});

test("analytic helpers agree with closed forms", () => {
  assert.ok(Math.abs(sineTarget(1.0) - 1.0) < 1e-15);
  assert.ok(Math.abs(sineTarget(0.5) - (1 - Math.pow(2 / Math.PI, 2))) < 1e-15);
  assert.equal(gaussianInverseMoment(3, 1), 0.5);
  assert.equal(gaussianInverseMoment(6, 2), 1 / 20);
  assert.ok(Math.abs(slopeThroughOrigin([1, 2], [2, 4]) - 2) < 1e-14);
});

test("cli renders and reports errors with exit codes", () => {
  const out = join(outDir, "cli.svg");
  const rc = cliMain(["wegner_linearity", "--in", join(FIXTURES, "wegner.csv"), "--out", out]);
  assert.equal(rc, 0);
  assert.ok(existsSync(out));
  assert.notEqual(cliMain(["nope", "--in", "x", "--out", "y"]), 0);
  assert.notEqual(cliMain(["correlation", "--out", "y"]), 0);
  assert.notEqual(
    cliMain(["correlation", "--in", join(FIXTURES, "wegner.csv"), "--out", join(outDir, "no.svg")]),
    0,
  );
});
