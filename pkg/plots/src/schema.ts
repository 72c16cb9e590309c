/**
 * Sweep-CSV loading and schema validation.
 *
 * Only the documented `aoi-grr-sweep-v1` schema is accepted; anything else
 * is refused with SchemaMismatch. Numeric fields may be empty (a per-point
 * error upstream) and parse to null.
 */

export const SCHEMA_ID = "aoi-grr-sweep-v1";

export const REQUIRED_COLUMNS = [
  "schema_id", "axis", "axis_value", "discipline", "g", "i", "k_or_longrun",
  "x", "p_hat", "ci_low", "ci_high", "ub_prob", "lb_prob", "ub_exponent",
  "lb_exponent", "rr_p_hat", "flags",
] as const;

export interface SweepRow {
  axis: string;
  axisValue: number;
  discipline: string;
  g: number;
  i: number;
  kOrLongrun: string;
  x: number;
  pHat: number | null;
  ciLow: number | null;
  ciHigh: number | null;
  ubProb: number | null;
  lbProb: number | null;
  ubExponent: number | null;
  lbExponent: number | null;
  rrPHat: number | null;
  flags: string[];
}

export class SchemaMismatch extends Error {}
export class InsufficientRows extends Error {}

function splitCsvLine(line: string): string[] {
  // The sweep writer never quotes fields; keep the parser honest about that.
  if (line.includes('"')) {
    throw new SchemaMismatch("quoted fields are not part of the sweep schema");
  }
  return line.split(",");
}

function num(field: string): number | null {
  if (field === "") return null;
  const v = Number(field);
  if (Number.isNaN(v)) throw new SchemaMismatch(`not a number: ${field}`);
  return v;
}

export function parseSweepCsv(text: string): SweepRow[] {
  const lines = text.trim().split(/\r?\n/);
  if (lines.length < 2) throw new InsufficientRows("no data rows");
  const header = splitCsvLine(lines[0]);
  for (const col of REQUIRED_COLUMNS) {
    if (!header.includes(col)) {
      throw new SchemaMismatch(`missing column ${col}`);
    }
  }
  const idx = new Map(header.map((name, j) => [name, j]));
  const at = (fields: string[], name: string) => fields[idx.get(name)!] ?? "";
  const rows: SweepRow[] = [];
  for (const line of lines.slice(1)) {
    if (line.trim() === "") continue;
    const f = splitCsvLine(line);
    const schema = at(f, "schema_id");
    if (schema !== SCHEMA_ID) {
      throw new SchemaMismatch(`unknown schema_id ${schema}`);
    }
    rows.push({
      axis: at(f, "axis"),
      axisValue: Number(at(f, "axis_value")),
      discipline: at(f, "discipline"),
      g: Number(at(f, "g")),
      i: Number(at(f, "i")),
      kOrLongrun: at(f, "k_or_longrun"),
      x: Number(at(f, "x")),
      pHat: num(at(f, "p_hat")),
      ciLow: num(at(f, "ci_low")),
      ciHigh: num(at(f, "ci_high")),
      ubProb: num(at(f, "ub_prob")),
      lbProb: num(at(f, "lb_prob")),
      ubExponent: num(at(f, "ub_exponent")),
      lbExponent: num(at(f, "lb_exponent")),
      rrPHat: num(at(f, "rr_p_hat")),
      flags: at(f, "flags").split(";").filter((s) => s.length > 0),
    });
  }
  const axes = new Set(rows.map((r) => r.axisValue));
  if (axes.size < 2) {
    throw new InsufficientRows(
      `need rows for >= 2 axis values, got ${axes.size}`,
    );
  }
  return rows;
}

/** Rows grouped by panel (one panel per source group), ascending. */
export function byGroup(rows: SweepRow[]): Map<number, SweepRow[]> {
  const groups = new Map<number, SweepRow[]>();
  for (const row of rows) {
    const list = groups.get(row.g) ?? [];
    list.push(row);
    groups.set(row.g, list);
  }
  for (const list of groups.values()) {
    list.sort((a, b) => a.axisValue - b.axisValue);
  }
  return new Map([...groups.entries()].sort((a, b) => a[0] - b[0]));
}
