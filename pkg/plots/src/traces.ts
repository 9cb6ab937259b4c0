/**
 * Time traces of one capture run: applied couplings on top, captured energy
 * fraction below, with optional dashed efficiency asymptotes.
 */

import { ParsedCsv } from "./csv.js";
import { Mark, Panel, Scene, Scale, applyScale, overlayLine, ticks, fmt } from "./scene.js";

export interface TracesOptions {
  overlays: number[];          // dashed horizontal efficiency lines
  width?: number;
  height?: number;
  maxPoints?: number;
}

function decimate(values: Float64Array, stride: number): number[] {
  const out: number[] = [];
  for (let i = 0; i < values.length; i += stride) out.push(values[i]);
  if ((values.length - 1) % stride !== 0) out.push(values[values.length - 1]);
  return out;
}

function polyline(panel: Panel, t: number[], y: number[], stroke: string,
                  dashed = false, label?: string): Mark {
  const points = t.map((ti, i): [number, number] =>
    [applyScale(panel.xScale, ti), applyScale(panel.yScale, y[i])]);
  return { kind: "polyline", points, stroke, strokeWidth: 1.4, dashed, label };
}

export function buildTracesScene(data: ParsedCsv, options: TracesOptions): Scene {
  const width = options.width ?? 640;
  const height = options.height ?? 560;
  const margin = { left: 64, right: 16, top: 36, bottom: 46 };
  const gap = 44;
  const maxPoints = options.maxPoints ?? 4000;
  const stride = Math.max(1, Math.ceil(data.rowCount / maxPoints));

  const t = decimate(data.columns.t, stride);
  const kappa1 = decimate(data.columns.kappa1, stride);
  const kappa2 = decimate(data.columns.kappa2, stride);
  const aSq = decimate(data.columns.a_sq, stride);

  const tMax = t[t.length - 1];
  const kMax = Math.max(...kappa1, ...kappa2, 1e-9);
  const panelHeight = (height - margin.top - margin.bottom - gap) / 2;

  const xScaleTop: Scale = { type: "linear", domain: [0, tMax],
                             range: [margin.left, width - margin.right] };
  const couplingPanel: Panel = {
    x0: margin.left, y0: margin.top,
    x1: width - margin.right, y1: margin.top + panelHeight,
    xScale: xScaleTop,
    yScale: { type: "linear", domain: [0, kMax * 1.05],
              range: [margin.top + panelHeight, margin.top] },
    marks: [], xLabel: "", yLabel: "coupling",
  };
  couplingPanel.marks.push(
    polyline(couplingPanel, t, kappa1, "#1f5fbf", false, "kappa1"));
  if (kappa2.some((v) => v > 0)) {
    couplingPanel.marks.push(
      polyline(couplingPanel, t, kappa2, "#bf4a1f", false, "kappa2"));
  }

  const effTop = margin.top + panelHeight + gap;
  const efficiencyPanel: Panel = {
    x0: margin.left, y0: effTop,
    x1: width - margin.right, y1: effTop + panelHeight,
    xScale: { ...xScaleTop },
    yScale: { type: "linear", domain: [0, 1.0], range: [effTop + panelHeight, effTop] },
    marks: [], xLabel: "t", yLabel: "captured fraction a^2",
  };
  efficiencyPanel.marks.push(
    polyline(efficiencyPanel, t, aSq, "#15803c", false, "a_sq"));
  for (const v of options.overlays) {
    efficiencyPanel.marks.push(overlayLine(efficiencyPanel, "y", v));
  }

  for (const panel of [couplingPanel, efficiencyPanel]) {
    for (const tick of ticks(panel.xScale)) {
      panel.marks.push({ kind: "text", x: applyScale(panel.xScale, tick),
                         y: panel.y1 + 14, text: fmt(tick), anchor: "middle", size: 10 });
    }
    for (const tick of ticks(panel.yScale, 4)) {
      panel.marks.push({ kind: "text", x: panel.x0 - 6,
                         y: applyScale(panel.yScale, tick) + 3, text: fmt(tick),
                         anchor: "end", size: 10 });
    }
  }

  const pulse = data.meta.pulse ?? "";
  const twoPass = data.meta.two_pass === "True";
  return { width, height,
           title: `${twoPass ? "two-pass" : "single-pass"} capture, ${pulse} pulse`,
           panels: [couplingPanel, efficiencyPanel] };
}
