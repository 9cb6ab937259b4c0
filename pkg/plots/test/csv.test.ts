import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import { SchemaError, axisValues, parseHeatmapCsv, parseTrajectoryCsv } from "../src/csv.js";

const heatmapText = readFileSync(new URL("../testdata/square_heatmap.csv", import.meta.url), "utf-8");
const traceText = readFileSync(new URL("../testdata/exp_single_trace.csv", import.meta.url), "utf-8");

describe("heatmap csv", () => {
  it("parses the long-form grid with metadata", () => {
    const parsed = parseHeatmapCsv(heatmapText);
    expect(parsed.rowCount).toBe(3600);
    expect(axisValues(parsed.columns.kappa1_max)).toHaveLength(60);
    expect(parsed.meta.pulse).toBe("square");
    expect(Number(parsed.meta.dt)).toBeCloseTo(5e-4, 12);
  });

  it("rejects a renamed column by name", () => {
    const corrupted = heatmapText.replace("kappa2_max", "kappa2max");
    expect(() => parseHeatmapCsv(corrupted)).toThrowError(SchemaError);
    try {
      parseHeatmapCsv(corrupted);
    } catch (err) {
      expect((err as SchemaError).column).toBe("kappa2max");
    }
  });

  it("rejects a missing column", () => {
    const corrupted = heatmapText.replace(",log10_loss", "");
    expect(() => parseHeatmapCsv(corrupted)).toThrow(/log10_loss/);
  });
});

describe("trajectory csv", () => {
  it("parses all thirteen columns", () => {
    const parsed = parseTrajectoryCsv(traceText);
    expect(parsed.columns.t).toHaveLength(parsed.rowCount);
    expect(parsed.columns.a_sq[parsed.rowCount - 1]).toBeGreaterThan(0.88);
    expect(parsed.meta.pulse).toBe("exp_decay");
  });

  it("rejects reordered columns", () => {
    const reordered = traceText.replace("t,b_in,kappa1", "t,kappa1,b_in");
    expect(() => parseTrajectoryCsv(reordered)).toThrowError(SchemaError);
  });

  it("rejects a ragged row", () => {
    const lines = traceText.split("\n");
    const dataAt = lines.findIndex((ln) => ln.startsWith("t,")) + 1;
    lines[dataAt] = lines[dataAt] + ",0.0";
    expect(() => parseTrajectoryCsv(lines.join("\n"))).toThrow(/row 1/);
  });
});
