/**
 * Minimal CSV reader for wigner-lab outputs.
 *
 * Files are plain comma-separated with a single header row and no quoting
 * (the producer never emits commas inside fields). Numeric-looking fields
 * are parsed to numbers; everything else stays a string.
 */

import { readFileSync } from "fs";

export type Cell = number | string;

export interface Table {
  columns: string[];
  rows: Cell[][];
}

export class SchemaError extends Error {}

export function parseCsv(text: string): Table {
  const lines = text
    .split(/\r?\n/)
    .map((l) => l.trim())
    .filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new SchemaError("CSV is empty (no header row)");
  }
  const columns = lines[0]!.split(",");
  const rows: Cell[][] = [];
  for (const line of lines.slice(1)) {
    const parts = line.split(",");
    if (parts.length !== columns.length) {
      throw new SchemaError(
        `row has ${parts.length} fields, header has ${columns.length}: ${line}`,
      );
    }
    rows.push(parts.map(parseCell));
  }
  return { columns, rows };
}

function parseCell(raw: string): Cell {
  if (raw === "nan") return NaN;
  if (raw === "inf") return Infinity;
  if (raw === "-inf") return -Infinity;
  const num = Number(raw);
  return raw !== "" && !Number.isNaN(num) ? num : raw;
}

export function readCsv(path: string): Table {
  return parseCsv(readFileSync(path, "utf8"));
}

/** Indices of the named columns; throws naming the first missing one. */
export function requireColumns(table: Table, names: string[]): number[] {
  return names.map((name) => {
    const i = table.columns.indexOf(name);
    if (i < 0) {
      throw new SchemaError(`missing required column '${name}'`);
    }
    return i;
  });
}

export function numberColumn(table: Table, name: string): number[] {
  const [i] = requireColumns(table, [name]);
  return table.rows.map((row, k) => {
    const v = row[i!];
    if (typeof v !== "number") {
      throw new SchemaError(`column '${name}' has non-numeric value at data row ${k}: ${v}`);
    }
    return v;
  });
}

export function requireNonEmpty(table: Table): void {
  if (table.rows.length === 0) {
    throw new SchemaError("CSV has a header but no data rows");
  }
}
