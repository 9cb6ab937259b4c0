/**
 * Standalone figure renderer for simulator CSV outputs.
 *
 * Usage:
 *   node dist/cli.js heatmap <input.csv> <output.svg> [--overlay VALUE]...
 *   node dist/cli.js traces  <input.csv> <output.svg> [--overlay VALUE]...
 *
 * Heatmap overlays draw dashed threshold lines on both cap axes; trace
 * overlays draw dashed efficiency asymptotes.  Rendering depends only on
 * the file contents and the arguments.
 */

import { readFileSync, writeFileSync } from "node:fs";

import { SchemaError, parseHeatmapCsv, parseTrajectoryCsv } from "./csv.js";
import { buildHeatmapScene } from "./heatmap.js";
import { buildTracesScene } from "./traces.js";
import { renderSvg } from "./svg.js";

function usage(): never {
  process.stderr.write(
    "usage: cli.js <heatmap|traces> <input.csv> <output.svg> [--overlay VALUE]...\n");
  process.exit(2);
}

export function main(argv: string[]): number {
  if (argv.length < 3) usage();
  const [kind, inputPath, outputPath, ...rest] = argv;
  const overlays: number[] = [];
  for (let i = 0; i < rest.length; i++) {
    if (rest[i] === "--overlay") {
      const value = Number(rest[++i]);
      if (!Number.isFinite(value)) usage();
      overlays.push(value);
    } else {
      usage();
    }
  }

  let text: string;
  try {
    text = readFileSync(inputPath, "utf-8");
  } catch (err) {
    process.stderr.write(`error: cannot read ${inputPath}: ${String(err)}\n`);
    return 1;
  }

  try {
    let svg: string;
    if (kind === "heatmap") {
      svg = renderSvg(buildHeatmapScene(parseHeatmapCsv(text), { overlays }));
    } else if (kind === "traces") {
      svg = renderSvg(buildTracesScene(parseTrajectoryCsv(text), { overlays }));
    } else {
      usage();
    }
    writeFileSync(outputPath, svg, "utf-8");
    process.stdout.write(`wrote ${outputPath}\n`);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError) {
      process.stderr.write(`error: schema mismatch in column ${err.column}: ${err.message}\n`);
      return 2;
    }
    process.stderr.write(`error: ${String(err)}\n`);
    return 1;
  }
}

if (process.argv[1] && process.argv[1].endsWith("cli.js")) {
  process.exit(main(process.argv.slice(2)));
}
