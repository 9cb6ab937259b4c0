/**
 * Deterministic figure model.
 *
 * Figures are built as plain data (panels, scales, marks) before any SVG is
 * emitted, so tests assert on rendered coordinates rather than pixels, and
 * rendering is a pure function of the inputs.
 */

export interface Scale {
  type: "linear" | "log";
  domain: [number, number];
  range: [number, number];
}

export function applyScale(scale: Scale, value: number): number {
  const [d0, d1] = scale.domain;
  const [r0, r1] = scale.range;
  let frac: number;
  if (scale.type === "log") {
    frac = (Math.log(value) - Math.log(d0)) / (Math.log(d1) - Math.log(d0));
  } else {
    frac = (value - d0) / (d1 - d0);
  }
  return r0 + frac * (r1 - r0);
}

export interface RectMark {
  kind: "rect";
  x: number; y: number; width: number; height: number;
  fill: string;
}

export interface LineMark {
  kind: "line";
  x1: number; y1: number; x2: number; y2: number;
  stroke: string;
  dashed: boolean;
  /** set on threshold overlays: which axis the data value lives on */
  role?: "overlay-x" | "overlay-y";
  value?: number;
}

export interface PolylineMark {
  kind: "polyline";
  points: Array<[number, number]>;
  stroke: string;
  strokeWidth: number;
  dashed: boolean;
  label?: string;
}

export interface TextMark {
  kind: "text";
  x: number; y: number;
  text: string;
  anchor: "start" | "middle" | "end";
  size: number;
}

export type Mark = RectMark | LineMark | PolylineMark | TextMark;

export interface Panel {
  x0: number; y0: number; x1: number; y1: number;
  xScale: Scale;
  yScale: Scale;
  marks: Mark[];
  xLabel: string;
  yLabel: string;
}

export interface Scene {
  width: number;
  height: number;
  title: string;
  panels: Panel[];
}

/** Dashed threshold line across the panel at data value v on the given axis. */
export function overlayLine(panel: Panel, axis: "x" | "y", value: number): LineMark {
  if (axis === "x") {
    const x = applyScale(panel.xScale, value);
    return { kind: "line", x1: x, y1: panel.y0, x2: x, y2: panel.y1,
             stroke: "#222222", dashed: true, role: "overlay-x", value };
  }
  const y = applyScale(panel.yScale, value);
  return { kind: "line", x1: panel.x0, y1: y, x2: panel.x1, y2: y,
           stroke: "#222222", dashed: true, role: "overlay-y", value };
}

/** Round-half-even free formatter: fixed 3 decimals keeps output byte-stable. */
export function fmt(v: number): string {
  if (!Number.isFinite(v)) return "0";
  return v.toFixed(3);
}

export function ticks(scale: Scale, count = 5): number[] {
  const [d0, d1] = scale.domain;
  const out: number[] = [];
  if (scale.type === "log") {
    const candidates = [0.1, 0.2, 0.5, 1, 2, 5, 10, 20, 50];
    for (const c of candidates) if (c >= d0 * 0.999 && c <= d1 * 1.001) out.push(c);
    return out;
  }
  for (let i = 0; i <= count; i++) out.push(d0 + ((d1 - d0) * i) / count);
  return out;
}
