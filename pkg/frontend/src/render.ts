import fs from "node:fs";
import path from "node:path";

import { CsvTable, column, loadCsv } from "./csv.js";
import { PlotSpec } from "./plotspec.js";
import { renderSvg } from "./svg.js";

/**
 * Load every referenced CSV, check the referenced columns exist, render,
 * and write the SVG.  Inputs are only ever read; the output write is
 * idempotent (same spec and data give identical bytes).
 */
export function renderToFile(spec: PlotSpec, outPath: string): string {
  const tables = new Map<string, CsvTable>();
  for (const panel of spec.panels) {
    for (const curve of panel.curves) {
      if (!tables.has(curve.csv)) {
        tables.set(curve.csv, loadCsv(curve.csv));
      }
      const table = tables.get(curve.csv)!;
      column(table, curve.x); // raises MissingColumnError with the name
      column(table, curve.y);
    }
  }
  const svg = renderSvg(spec, tables);
  fs.mkdirSync(path.dirname(path.resolve(outPath)), { recursive: true });
  fs.writeFileSync(outPath, svg, "utf8");
  return outPath;
}
