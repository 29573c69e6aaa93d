/**
 * Schema-aware CSV reading.
 *
 * Files produced by the fso-cvmdi CLI start with a `# schema=N` comment,
 * then a header row; every data row carries the producing config's hash
 * in the `config_hash` column. Readers refuse files without the schema
 * marker, empty files, and files whose hash column is not uniform.
 */
import { readFileSync } from "node:fs";

export const SUPPORTED_SCHEMA = 1;

export class CsvError extends Error {}

export interface Table {
  path: string;
  schema: number;
  hash: string;
  columns: string[];
  rows: Record<string, string>[];
}

export function readCsv(path: string): Table {
  let text: string;
  try {
    text = readFileSync(path, "utf8");
  } catch {
    throw new CsvError(`cannot read ${path}`);
  }
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new CsvError(`${path}: empty file`);
  }
  const schemaMatch = /^#\s*schema\s*=\s*(\d+)\s*$/.exec(lines[0]);
  if (!schemaMatch) {
    throw new CsvError(`${path}: missing '# schema=N' comment line`);
  }
  const schema = Number(schemaMatch[1]);
  if (schema !== SUPPORTED_SCHEMA) {
    throw new CsvError(`${path}: unsupported schema ${schema}`);
  }
  if (lines.length < 2) {
    throw new CsvError(`${path}: missing header row`);
  }
  const columns = lines[1].split(",");
  if (!columns.includes("config_hash")) {
    throw new CsvError(`${path}: missing required column config_hash`);
  }
  const rows: Record<string, string>[] = [];
  for (const line of lines.slice(2)) {
    const parts = line.split(",");
    if (parts.length !== columns.length) {
      throw new CsvError(
        `${path}: row has ${parts.length} fields, header has ${columns.length}`,
      );
    }
    const row: Record<string, string> = {};
    columns.forEach((col, i) => (row[col] = parts[i]));
    rows.push(row);
  }
  if (rows.length === 0) {
    throw new CsvError(`${path}: no data rows`);
  }
  const hashes = new Set(rows.map((r) => r.config_hash));
  if (hashes.size !== 1) {
    throw new CsvError(
      `${path}: mixed config hashes within one file: ${[...hashes].join(", ")}`,
    );
  }
  return { path, schema, hash: rows[0].config_hash, columns, rows };
}

/** Require columns; name every missing one in the error. */
export function requireColumns(table: Table, needed: string[]): void {
  const missing = needed.filter((c) => !table.columns.includes(c));
  if (missing.length > 0) {
    throw new CsvError(`${table.path}: missing column(s) ${missing.join(", ")}`);
  }
}

/** Merge tables into one dataset; all inputs must share one config hash. */
export function mergeTables(tables: Table[]): Table {
  const hashes = new Set(tables.map((t) => t.hash));
  if (hashes.size !== 1) {
    throw new CsvError(
      `mixed config hashes across inputs: ${[...hashes].join(", ")} ` +
        `(${tables.map((t) => t.path).join(", ")})`,
    );
  }
  const [first, ...rest] = tables;
  const columns = first.columns.filter((c) =>
    rest.every((t) => t.columns.includes(c)),
  );
  return {
    path: tables.map((t) => t.path).join("+"),
    schema: first.schema,
    hash: first.hash,
    columns,
    rows: tables.flatMap((t) => t.rows),
  };
}

export function numeric(row: Record<string, string>, column: string): number {
  return Number(row[column]);
}
