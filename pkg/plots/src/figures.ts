/**
 * The six figure kinds, each reading one (or several) wigner-lab CSVs and
 * writing a single SVG with the empirical points and a recomputed analytic
 * overlay. Nothing is written when validation fails.
 */

import { writeFileSync } from "fs";

import {
  gaussianInverseMoment,
  lineFit,
  semicircleDensity,
  sineTarget,
  slopeThroughOrigin,
} from "./analytic.js";
import { numberColumn, readCsv, requireColumns, requireNonEmpty, SchemaError, Table } from "./csv.js";
import { ChartSpec, renderChart, Series } from "./svg.js";

export const FIGURE_KINDS = [
  "wegner_linearity",
  "semicircle",
  "gap_tail",
  "correlation",
  "deloc",
  "invmom_uniformity",
] as const;

export type FigureKind = (typeof FIGURE_KINDS)[number];

export interface FigureSpec {
  kind: FigureKind;
  inputs: string[];
  output: string;
  title?: string;
}

export class OverlayMismatchError extends Error {}

const BLUE = "#1f5fa8";
const RED = "#c03a2b";
const GREY = "#666666";
const GREEN = "#2e7d4f";
const ORANGE = "#d98c21";

/** Tolerance for the producer-vs-renderer sine overlay cross-check. */
export const OVERLAY_TOL = 1e-9;

function singleInput(spec: FigureSpec): Table {
  if (spec.inputs.length !== 1) {
    throw new SchemaError(`figure '${spec.kind}' takes exactly one input CSV, got ${spec.inputs.length}`);
  }
  const table = readCsv(spec.inputs[0]!);
  requireNonEmpty(table);
  return table;
}

function curve(lo: number, hi: number, n: number, f: (x: number) => number): { x: number[]; y: number[] } {
  const x: number[] = [];
  const y: number[] = [];
  for (let i = 0; i <= n; i++) {
    const v = lo + ((hi - lo) * i) / n;
    x.push(v);
    y.push(f(v));
  }
  return { x, y };
}

function wegnerLinearity(spec: FigureSpec): ChartSpec {
  const t = singleInput(spec);
  const eps = numberColumn(t, "K_or_eta");
  const p = numberColumn(t, "estimate");
  const se = numberColumn(t, "stderr");
  const slope = slopeThroughOrigin(eps, p);
  const fit = curve(0, Math.max(...eps) * 1.05, 64, (x) => slope * x);
  return {
    title: spec.title ?? "Interval-hit probability vs interval scale",
    xLabel: "eps (interval length in units of 1/N)",
    yLabel: "P(at least one eigenvalue in interval)",
    yZero: true,
    series: [
      { kind: "line", ...fit, color: GREY, label: `fit through origin`, dash: "6 4" },
      { kind: "points", x: eps, y: p, yerr: se.map((s) => 2 * s), color: BLUE, label: "Monte Carlo estimate" },
    ],
    annotations: [`slope = ${slope.toPrecision(4)}`, `1/pi = ${(1 / Math.PI).toPrecision(4)}`],
  };
}

function semicircleFigure(spec: FigureSpec): ChartSpec {
  const t = singleInput(spec);
  const E = numberColumn(t, "E");
  const est = numberColumn(t, "estimate");
  const se = numberColumn(t, "stderr");
  const lo = Math.min(-2.1, Math.min(...E));
  const hi = Math.max(2.1, Math.max(...E));
  const rho = curve(lo, hi, 256, semicircleDensity);
  return {
    title: spec.title ?? "Empirical density of states vs the semicircle law",
    xLabel: "E",
    yLabel: "density of states",
    yZero: true,
    series: [
      { kind: "line", ...rho, color: RED, label: "semicircle density" },
      { kind: "points", x: E, y: est, yerr: se.map((s) => 2 * s), color: BLUE, label: "Monte Carlo estimate" },
    ],
  };
}

function gapTail(spec: FigureSpec): ChartSpec {
  const t = singleInput(spec);
  const K = numberColumn(t, "K_or_eta");
  const surv = numberColumn(t, "estimate");
  const se = numberColumn(t, "stderr");
  const x: number[] = [];
  const y: number[] = [];
  const yerr: number[] = [];
  for (let i = 0; i < K.length; i++) {
    if (surv[i]! > 0) {
      x.push(Math.sqrt(K[i]!));
      y.push(Math.log(surv[i]!));
      yerr.push((2 * se[i]!) / surv[i]!);
    }
  }
  if (x.length < 2) {
    throw new SchemaError("gap_tail needs at least two positive survival points");
  }
  const { a, b } = lineFit(x, y);
  const fit = curve(Math.min(...x), Math.max(...x), 32, (v) => a + b * v);
  return {
    title: spec.title ?? "Gap survival: log P(Delta >= K) vs sqrt(K)",
    xLabel: "sqrt(K)",
    yLabel: "log survival",
    series: [
      { kind: "line", ...fit, color: GREY, label: "stretched-exponential fit", dash: "6 4" },
      { kind: "points", x, y, yerr, color: GREEN, label: "empirical survival" },
    ],
    annotations: [`fit: ${a.toPrecision(3)} - ${(-b).toPrecision(3)} sqrt(K)`],
  };
}

function correlation(spec: FigureSpec): ChartSpec {
  const t = singleInput(spec);
  requireColumns(t, ["s_bin_center", "R2_estimate", "R2_stderr", "sine_target"]);
  const s = numberColumn(t, "s_bin_center");
  const r2 = numberColumn(t, "R2_estimate");
  const se = numberColumn(t, "R2_stderr");
  const target = numberColumn(t, "sine_target");
  for (let i = 0; i < s.length; i++) {
    const mine = sineTarget(s[i]!);
    if (Math.abs(mine - target[i]!) > OVERLAY_TOL) {
      throw new OverlayMismatchError(
        `sine_target mismatch at s=${s[i]}: file has ${target[i]}, recomputed ${mine}`,
      );
    }
  }
  const overlay = curve(0, Math.max(...s) * 1.05, 256, sineTarget);
  return {
    title: spec.title ?? "Two-point correlation vs the sine-kernel determinant",
    xLabel: "rescaled separation s",
    yLabel: "R2(s)",
    yZero: true,
    series: [
      { kind: "line", ...overlay, color: RED, label: "1 - S(s)^2" },
      { kind: "points", x: s, y: r2, yerr: se.map((v) => 2 * v), color: BLUE, label: "pair-counting estimate" },
    ],
  };
}

function deloc(spec: FigureSpec): ChartSpec {
  if (spec.inputs.length < 1) {
    throw new SchemaError("deloc takes at least one input CSV");
  }
  const ns: number[] = [];
  const rows: Record<string, number>[] = [];
  for (const path of spec.inputs) {
    const t = readCsv(path);
    requireNonEmpty(t);
    requireColumns(t, ["N", "mean", "max", "q50", "q90", "q99", "baseline_flat"]);
    for (let k = 0; k < t.rows.length; k++) {
      const row: Record<string, number> = {};
      for (const col of ["N", "mean", "max", "q50", "q90", "q99"]) {
        const v = t.rows[k]![t.columns.indexOf(col)];
        row[col] = v as number;
      }
      ns.push(row["N"]!);
      rows.push(row);
    }
  }
  const order = ns.map((_, i) => i).sort((a, b) => ns[a]! - ns[b]!);
  const pick = (col: string) => order.map((i) => rows[i]![col]!);
  const xs = order.map((i) => ns[i]!);
  const series: Series[] = [
    { kind: "line", x: [Math.min(...xs) * 0.9, Math.max(...xs) * 1.1], y: [1, 1], color: GREY, label: "flat-vector baseline", dash: "4 4" },
    { kind: "points", x: xs, y: pick("q50"), color: BLUE, label: "median" },
    { kind: "points", x: xs, y: pick("q90"), color: GREEN, label: "90th percentile" },
    { kind: "points", x: xs, y: pick("q99"), color: ORANGE, label: "99th percentile" },
    { kind: "points", x: xs, y: pick("max"), color: RED, label: "max" },
  ];
  return {
    title: spec.title ?? "Eigenvector norm statistic across dimension",
    xLabel: "N",
    yLabel: "normalized p-norm of bulk eigenvectors",
    yZero: true,
    series,
  };
}

function invmomUniformity(spec: FigureSpec): ChartSpec {
  const t = singleInput(spec);
  requireColumns(t, ["N", "estimate", "stderr", "m", "r", "law"]);
  const N = numberColumn(t, "N");
  const est = numberColumn(t, "estimate");
  const se = numberColumn(t, "stderr");
  const m = numberColumn(t, "m");
  const r = numberColumn(t, "r");
  const lawIdx = t.columns.indexOf("law");
  const x = N.map((n) => Math.log10(n));
  const series: Series[] = [];
  if (t.rows.every((row) => row[lawIdx] === "gaussian")) {
    const oracle = gaussianInverseMoment(m[0]!, r[0]!);
    series.push({
      kind: "line",
      x: [Math.min(...x) - 0.1, Math.max(...x) + 0.1],
      y: [oracle, oracle],
      color: RED,
      label: "closed-form benchmark",
    });
  }
  series.push({
    kind: "points", x, y: est, yerr: se.map((v) => 2 * v), color: BLUE,
    label: `inverse moment (m=${m[0]}, r=${r[0]})`,
  });
  return {
    title: spec.title ?? "Inverse overlap moment: flat across ambient dimension",
    xLabel: "log10 N",
    yLabel: "E (sum |b.u_j|^2)^-r",
    yZero: true,
    series,
  };
}

const RENDERERS: Record<FigureKind, (spec: FigureSpec) => ChartSpec> = {
  wegner_linearity: wegnerLinearity,
  semicircle: semicircleFigure,
  gap_tail: gapTail,
  correlation: correlation,
  deloc: deloc,
  invmom_uniformity: invmomUniformity,
};

/** Validate inputs, build the chart, and only then touch the output path. */
export function render(spec: FigureSpec): void {
  const renderer = RENDERERS[spec.kind];
  if (!renderer) {
    throw new SchemaError(`unknown figure kind '${spec.kind}'; expected one of ${FIGURE_KINDS.join(", ")}`);
  }
  const svg = renderChart(renderer(spec));
  writeFileSync(spec.output, svg);
}
