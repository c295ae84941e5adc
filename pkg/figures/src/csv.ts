import { readFileSync } from "fs";
import Papa from "papaparse";

export type Row = Record<string, number | string | null>;

export interface Table {
  header: string[];
  rows: Row[];
}

export function readCsv(path: string): Table {
  const text = readFileSync(path, "utf8");
  const parsed = Papa.parse<Row>(text.trim(), {
    header: true,
    dynamicTyping: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0];
    throw new Error(`${path}: CSV parse error at row ${first.row}: ${first.message}`);
  }
  const header = parsed.meta.fields ?? [];
  return { header, rows: parsed.data };
}

/** Fail loudly when a recipe references columns the file does not carry. */
export function requireColumns(table: Table, columns: string[], path: string): void {
  const missing = columns.filter((c) => !table.header.includes(c));
  if (missing.length > 0) {
    throw new Error(
      `${path}: missing column(s) ${missing.join(", ")}; header has ${table.header.join(", ")}`,
    );
  }
}

function asNumber(value: number | string | null | undefined): number | null {
  if (value === null || value === undefined || value === "") return null;
  const v = Number(value);
  return Number.isFinite(v) ? v : null;
}

export function numericColumn(table: Table, column: string): number[] {
  return table.rows
    .map((r) => asNumber(r[column]))
    .filter((v): v is number => v !== null);
}

/** Paired numeric series, dropping rows where either side is blank or not a
 * number (the per-multiplicity table leaves e_raw empty beyond r = 1). */
export function series(table: Table, xCol: string, yCol: string): Array<[number, number]> {
  const out: Array<[number, number]> = [];
  for (const row of table.rows) {
    const x = asNumber(row[xCol]);
    const y = asNumber(row[yCol]);
    if (x !== null && y !== null) out.push([x, y]);
  }
  return out;
}
