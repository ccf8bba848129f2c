#!/usr/bin/env node
/**
 * Usage:
 *   wigner-lab-plot <kind> --in <csv> [--in <csv> ...] --out <img> [--title <text>]
 *
 * Kinds: wegner_linearity, semicircle, gap_tail, correlation, deloc,
 * invmom_uniformity. Exits non-zero (writing nothing) when the CSV schema
 * does not match or a recomputed overlay disagrees with the file.
 */

import { FIGURE_KINDS, FigureKind, FigureSpec, render } from "./figures.js";

export function parseArgs(argv: string[]): FigureSpec {
  if (argv.length === 0) {
    throw new Error(`usage: plot <kind> --in <csv> --out <img>; kinds: ${FIGURE_KINDS.join(", ")}`);
  }
  const kind = argv[0] as FigureKind;
  if (!FIGURE_KINDS.includes(kind)) {
    throw new Error(`unknown figure kind '${argv[0]}'; expected one of ${FIGURE_KINDS.join(", ")}`);
  }
  const inputs: string[] = [];
  let output: string | undefined;
  let title: string | undefined;
  for (let i = 1; i < argv.length; i++) {
    const flag = argv[i];
    const value = argv[i + 1];
    if (value === undefined) {
      throw new Error(`flag ${flag} needs a value`);
    }
    if (flag === "--in") inputs.push(value);
    else if (flag === "--out") output = value;
    else if (flag === "--title") title = value;
    else throw new Error(`unknown flag ${flag}`);
    i++;
  }
  if (inputs.length === 0 || !output) {
    throw new Error("need at least one --in and exactly one --out");
  }
  return { kind, inputs, output, title };
}

export function main(argv: string[]): number {
  try {
    render(parseArgs(argv));
    return 0;
  } catch (err) {
    process.stderr.write(`${err instanceof Error ? err.message : err}\n`);
    return 1;
  }
}

const invokedDirectly = process.argv[1] && import.meta.url.endsWith(process.argv[1].split("/").pop()!);
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
