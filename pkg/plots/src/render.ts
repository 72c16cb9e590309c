/**
 * CLI: render one sweep CSV into a multi-panel SVG figure.
 *
 *   node dist/render.js --recipe recipe.json --out figure.svg
 *
 * The recipe names the input CSV and figure kind:
 *   { "csv": "data.csv", "kind": "violation-vs-n",
 *     "title"?: "...", "fitRange"?: [lo, hi] }
 *
 * Alongside the SVG a `<out>.slopes.json` sidecar records the per-panel
 * fitted slope of ln(p_hat) against the axis (the number cross-checked by
 * the acceptance suite).
 */

import { readFileSync, writeFileSync } from "node:fs";
import { dirname, resolve } from "node:path";
import process from "node:process";

import { parseSweepCsv, InsufficientRows, SchemaMismatch } from "./schema.js";
import { FIGURE_KINDS, FigureKind, KindMismatch, renderFigure } from "./figure.js";

interface Recipe {
  csv: string;
  kind: FigureKind;
  title?: string;
  fitRange?: [number, number];
}

function parseArgs(argv: string[]): { recipe: string; out: string } {
  let recipe = "";
  let out = "";
  for (let j = 0; j < argv.length; j++) {
    if (argv[j] === "--recipe") recipe = argv[++j] ?? "";
    else if (argv[j] === "--out") out = argv[++j] ?? "";
    else {
      console.error(`unknown argument: ${argv[j]}`);
      process.exit(2);
    }
  }
  if (!recipe || !out) {
    console.error("usage: render --recipe R.json --out fig.svg");
    process.exit(2);
  }
  return { recipe, out };
}

export function main(argv: string[]): number {
  const { recipe: recipePath, out } = parseArgs(argv);
  let recipe: Recipe;
  try {
    recipe = JSON.parse(readFileSync(recipePath, "utf-8"));
  } catch (err) {
    console.error(`cannot read recipe ${recipePath}: ${err}`);
    return 2;
  }
  if (!(recipe.kind in FIGURE_KINDS)) {
    console.error(`unknown figure kind ${recipe.kind}`);
    return 2;
  }
  const csvPath = resolve(dirname(resolve(recipePath)), recipe.csv);
  try {
    const rows = parseSweepCsv(readFileSync(csvPath, "utf-8"));
    const title = recipe.title ?? `${recipe.kind} (${csvPath})`;
    const figure = renderFigure(rows, recipe.kind, title, recipe.fitRange);
    writeFileSync(out, figure.svg);
    writeFileSync(
      `${out}.slopes.json`,
      JSON.stringify({ kind: recipe.kind, panels: figure.panels }, null, 2),
    );
    console.log(`wrote ${out} (${figure.panels.length} panels)`);
    return 0;
  } catch (err) {
    if (err instanceof SchemaMismatch || err instanceof KindMismatch) {
      console.error(`schema mismatch: ${(err as Error).message}`);
      return 2;
    }
    if (err instanceof InsufficientRows) {
      console.error(`insufficient rows: ${(err as Error).message}`);
      return 2;
    }
    console.error(String(err));
    return 3;
  }
}

const isMain = process.argv[1] !== undefined &&
  import.meta.url === new URL(`file://${resolve(process.argv[1])}`).href;
if (isMain) {
  process.exit(main(process.argv.slice(2)));
}
