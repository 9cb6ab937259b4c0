/**
 * Loss-landscape heatmap: log10(capture loss) over the coupling-cap plane.
 *
 * Cells at or below the 1e-12 loss floor render white (perfect capture);
 * the color scale is fixed to log10-loss in [-12, 0] so white regions are
 * comparable across runs.  Optional dashed overlays mark threshold caps
 * (drawn on both axes, crossing at the diagonal point).
 */

import { ParsedCsv, axisValues } from "./csv.js";
import { Mark, Panel, Scene, Scale, applyScale, overlayLine, ticks, fmt } from "./scene.js";

export const LOSS_FLOOR = 1e-12;
export const LOG_LOSS_MIN = -12;
export const LOG_LOSS_MAX = 0;

export const WHITE = "#ffffff";

/** Fixed dark-blue -> yellow ramp over log10 loss in [-12, 0]. */
export function lossColor(loss: number, log10Loss: number): string {
  if (Number.isNaN(loss)) return "#bbbbbb";
  if (loss <= LOSS_FLOOR) return WHITE;
  const u = Math.min(1, Math.max(0, (log10Loss - LOG_LOSS_MIN) / (LOG_LOSS_MAX - LOG_LOSS_MIN)));
  const r = Math.round(20 + 235 * u);
  const g = Math.round(20 + 200 * u);
  const b = Math.round(90 + 40 * (1 - u) - 70 * u);
  const hex = (v: number) => v.toString(16).padStart(2, "0");
  return `#${hex(r)}${hex(g)}${hex(b)}`;
}

/** Geometric cell edges around log-spaced centers (arithmetic for linear). */
export function cellEdges(centers: number[]): number[] {
  const n = centers.length;
  const edges = new Array<number>(n + 1);
  for (let i = 1; i < n; i++) edges[i] = Math.sqrt(centers[i - 1] * centers[i]);
  edges[0] = centers[0] * (centers[0] / edges[1]);
  edges[n] = centers[n - 1] * (centers[n - 1] / edges[n - 1]);
  return edges;
}

export interface HeatmapOptions {
  overlays: number[];
  width?: number;
  height?: number;
}

export function buildHeatmapScene(data: ParsedCsv, options: HeatmapOptions): Scene {
  const width = options.width ?? 560;
  const height = options.height ?? 520;
  const margin = { left: 70, right: 20, top: 40, bottom: 55 };

  const k1 = axisValues(data.columns.kappa1_max);
  const k2 = axisValues(data.columns.kappa2_max);
  const e1 = cellEdges(k1);
  const e2 = cellEdges(k2);

  const xScale: Scale = { type: "log", domain: [e1[0], e1[k1.length]],
                          range: [margin.left, width - margin.right] };
  const yScale: Scale = { type: "log", domain: [e2[0], e2[k2.length]],
                          range: [height - margin.bottom, margin.top] };

  const index = new Map<string, { loss: number; log: number }>();
  for (let r = 0; r < data.rowCount; r++) {
    index.set(`${data.columns.kappa1_max[r]}|${data.columns.kappa2_max[r]}`,
              { loss: data.columns.loss[r], log: data.columns.log10_loss[r] });
  }

  const marks: Mark[] = [];
  for (let i = 0; i < k1.length; i++) {
    for (let j = 0; j < k2.length; j++) {
      const cell = index.get(`${k1[i]}|${k2[j]}`);
      if (!cell) continue;
      const x = applyScale(xScale, e1[i]);
      const xNext = applyScale(xScale, e1[i + 1]);
      const yTop = applyScale(yScale, e2[j + 1]);
      const yBottom = applyScale(yScale, e2[j]);
      marks.push({ kind: "rect", x, y: yTop, width: xNext - x,
                   height: yBottom - yTop, fill: lossColor(cell.loss, cell.log) });
    }
  }

  const panel: Panel = {
    x0: margin.left, y0: margin.top,
    x1: width - margin.right, y1: height - margin.bottom,
    xScale, yScale, marks,
    xLabel: "kappa1_max", yLabel: "kappa2_max",
  };

  for (const v of options.overlays) {
    panel.marks.push(overlayLine(panel, "x", v));
    panel.marks.push(overlayLine(panel, "y", v));
  }

  for (const t of ticks(xScale)) {
    panel.marks.push({ kind: "text", x: applyScale(xScale, t),
                       y: height - margin.bottom + 16, text: fmt(t),
                       anchor: "middle", size: 10 });
  }
  for (const t of ticks(yScale)) {
    panel.marks.push({ kind: "text", x: margin.left - 6,
                       y: applyScale(yScale, t) + 3, text: fmt(t),
                       anchor: "end", size: 10 });
  }

  const pulse = data.meta.pulse ?? "";
  return { width, height,
           title: `two-pass capture loss, ${pulse} pulse (log10, floor 1e-12)`,
           panels: [panel] };
}
