/** Minimal CSV reader for the harness output files (no quoting, comma
 * separator, mandatory header row). */

export interface Table {
  columns: string[];
  rows: string[][];
}

export class MissingColumnError extends Error {
  constructor(missing: string[]) {
    super(`missing required column(s): ${missing.join(", ")}`);
    this.name = "MissingColumnError";
  }
}

export function parseCsv(text: string): Table {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new Error("empty CSV input");
  }
  const columns = lines[0].split(",");
  const rows = lines.slice(1).map((line) => line.split(","));
  for (const row of rows) {
    if (row.length !== columns.length) {
      throw new Error(`row has ${row.length} fields, header has ${columns.length}`);
    }
  }
  return { columns, rows };
}

/** Indexes of the named columns, in order; throws when any are absent. */
export function requireColumns(table: Table, names: string[]): number[] {
  const missing = names.filter((n) => !table.columns.includes(n));
  if (missing.length > 0) {
    throw new MissingColumnError(missing);
  }
  return names.map((n) => table.columns.indexOf(n));
}

export function numberAt(row: string[], index: number): number {
  const value = Number(row[index]);
  if (!Number.isFinite(value)) {
    throw new Error(`non-numeric field: ${row[index]}`);
  }
  return value;
}
