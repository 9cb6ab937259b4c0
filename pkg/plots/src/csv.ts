/**
 * Strict readers for the simulator's CSV outputs.
 *
 * Files carry `# key: value` comment lines followed by an exact header row;
 * any header deviation is rejected with the offending column named, so a
 * figure can never silently render the wrong quantity.
 */

export const TRAJECTORY_COLUMNS = [
  "t", "b_in", "kappa1", "a", "a_sq", "b_out", "b_in2", "kappa2", "b_out2",
  "e_in_cum", "e_out_cum", "e_loss_cum", "e_delay_inflight",
] as const;

export const HEATMAP_COLUMNS = [
  "kappa1_max", "kappa2_max", "loss", "log10_loss",
] as const;

export class SchemaError extends Error {
  constructor(public readonly column: string, message: string) {
    super(message);
    this.name = "SchemaError";
  }
}

export interface ParsedCsv {
  meta: Record<string, string>;
  columns: Record<string, Float64Array>;
  rowCount: number;
}

function parseNumber(token: string): number {
  if (token === "nan") return Number.NaN;
  if (token === "inf") return Number.POSITIVE_INFINITY;
  if (token === "-inf") return Number.NEGATIVE_INFINITY;
  const v = Number(token);
  if (Number.isNaN(v) && token !== "NaN") {
    throw new SchemaError(token, `unparseable numeric field ${JSON.stringify(token)}`);
  }
  return v;
}

export function parseCsv(text: string, expected: readonly string[]): ParsedCsv {
  const lines = text.split(/\r?\n/).filter((ln) => ln.length > 0);
  const meta: Record<string, string> = {};
  let headerIndex = -1;
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i];
    if (line.startsWith("#")) {
      const body = line.slice(1).trim();
      const colon = body.indexOf(":");
      if (colon > 0) meta[body.slice(0, colon).trim()] = body.slice(colon + 1).trim();
      continue;
    }
    headerIndex = i;
    break;
  }
  if (headerIndex < 0) throw new SchemaError("(header)", "no header row found");

  const header = lines[headerIndex].split(",");
  for (let i = 0; i < Math.max(header.length, expected.length); i++) {
    if (header[i] !== expected[i]) {
      const got = header[i] ?? "(missing)";
      const want = expected[i] ?? "(no further columns)";
      throw new SchemaError(got,
        `header mismatch at column ${i + 1}: got ${JSON.stringify(got)}, ` +
        `expected ${JSON.stringify(want)}`);
    }
  }

  const dataLines = lines.slice(headerIndex + 1);
  const columns: Record<string, Float64Array> = {};
  for (const name of expected) columns[name] = new Float64Array(dataLines.length);
  dataLines.forEach((line, row) => {
    const parts = line.split(",");
    if (parts.length !== expected.length) {
      throw new SchemaError(`(row ${row + 1})`,
        `row ${row + 1} has ${parts.length} fields, expected ${expected.length}`);
    }
    for (let c = 0; c < expected.length; c++) {
      columns[expected[c]][row] = parseNumber(parts[c]);
    }
  });
  return { meta, columns, rowCount: dataLines.length };
}

export function parseTrajectoryCsv(text: string): ParsedCsv {
  return parseCsv(text, TRAJECTORY_COLUMNS);
}

export function parseHeatmapCsv(text: string): ParsedCsv {
  return parseCsv(text, HEATMAP_COLUMNS);
}

/** Distinct sorted values of a long-form axis column. */
export function axisValues(column: Float64Array): number[] {
  const seen = new Set<number>();
  for (const v of column) seen.add(v);
  return [...seen].sort((a, b) => a - b);
}
