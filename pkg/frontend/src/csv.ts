import fs from "node:fs";
import Papa from "papaparse";

export interface CsvTable {
  path: string;
  columns: string[];
  /** Column-major numeric data; NaN marks failed rows. */
  data: Map<string, number[]>;
  rowCount: number;
}

export class CsvError extends Error {}

export class MissingColumnError extends CsvError {
  constructor(path: string, column: string, available: string[]) {
    super(
      `column "${column}" not found in ${path} (available: ${available.join(", ")})`,
    );
  }
}

function toNumber(raw: string): number {
  const trimmed = raw.trim();
  if (trimmed === "" || trimmed.toLowerCase() === "nan") return NaN;
  const value = Number(trimmed);
  return Number.isFinite(value) ? value : NaN;
}

/** Load a scan CSV (header row mandatory, '.' decimal separator). */
export function loadCsv(path: string): CsvTable {
  if (!fs.existsSync(path)) {
    throw new CsvError(`no such file: ${path}`);
  }
  const text = fs.readFileSync(path, "utf8");
  if (text.trim() === "") {
    throw new CsvError(`${path}: empty CSV (no header row)`);
  }
  const parsed = Papa.parse<string[]>(text.trim(), { skipEmptyLines: true });
  if (parsed.errors.length > 0) {
    throw new CsvError(`${path}: ${parsed.errors[0].message}`);
  }
  const rows = parsed.data;
  if (rows.length === 0) {
    throw new CsvError(`${path}: empty CSV (no header row)`);
  }
  const columns = rows[0].map((c) => c.trim());
  if (rows.length === 1) {
    throw new CsvError(`${path}: CSV has a header but no data rows`);
  }
  const data = new Map<string, number[]>(columns.map((c) => [c, []]));
  for (const row of rows.slice(1)) {
    columns.forEach((col, i) => {
      data.get(col)!.push(i < row.length ? toNumber(row[i]) : NaN);
    });
  }
  return { path, columns, data, rowCount: rows.length - 1 };
}

/** Column values, or a named error when the header lacks the column. */
export function column(table: CsvTable, name: string): number[] {
  const values = table.data.get(name);
  if (values === undefined) {
    throw new MissingColumnError(table.path, name, table.columns);
  }
  return values;
}
