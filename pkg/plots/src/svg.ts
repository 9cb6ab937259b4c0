/** Scene-to-SVG serialization: a pure function of the scene, byte-stable. */

import { Mark, Panel, Scene, fmt } from "./scene.js";

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function markSvg(mark: Mark): string {
  switch (mark.kind) {
    case "rect":
      return `<rect x="${fmt(mark.x)}" y="${fmt(mark.y)}" width="${fmt(mark.width)}" ` +
             `height="${fmt(mark.height)}" fill="${mark.fill}"/>`;
    case "line": {
      const dash = mark.dashed ? ' stroke-dasharray="6 4"' : "";
      return `<line x1="${fmt(mark.x1)}" y1="${fmt(mark.y1)}" x2="${fmt(mark.x2)}" ` +
             `y2="${fmt(mark.y2)}" stroke="${mark.stroke}" stroke-width="1.2"${dash}/>`;
    }
    case "polyline": {
      const pts = mark.points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
      const dash = mark.dashed ? ' stroke-dasharray="6 4"' : "";
      return `<polyline points="${pts}" fill="none" stroke="${mark.stroke}" ` +
             `stroke-width="${fmt(mark.strokeWidth)}"${dash}/>`;
    }
    case "text":
      return `<text x="${fmt(mark.x)}" y="${fmt(mark.y)}" text-anchor="${mark.anchor}" ` +
             `font-size="${mark.size}" font-family="sans-serif">${esc(mark.text)}</text>`;
  }
}

function panelSvg(panel: Panel): string {
  const frame = `<rect x="${fmt(panel.x0)}" y="${fmt(panel.y0)}" ` +
    `width="${fmt(panel.x1 - panel.x0)}" height="${fmt(panel.y1 - panel.y0)}" ` +
    `fill="none" stroke="#444444" stroke-width="1"/>`;
  const xLabel = panel.xLabel
    ? `<text x="${fmt((panel.x0 + panel.x1) / 2)}" y="${fmt(panel.y1 + 32)}" ` +
      `text-anchor="middle" font-size="12" font-family="sans-serif">${esc(panel.xLabel)}</text>`
    : "";
  const yLabel = panel.yLabel
    ? `<text x="${fmt(panel.x0 - 46)}" y="${fmt((panel.y0 + panel.y1) / 2)}" ` +
      `text-anchor="middle" font-size="12" font-family="sans-serif" ` +
      `transform="rotate(-90 ${fmt(panel.x0 - 46)} ${fmt((panel.y0 + panel.y1) / 2)})">` +
      `${esc(panel.yLabel)}</text>`
    : "";
  return [...panel.marks.map(markSvg), frame, xLabel, yLabel].join("\n");
}

export function renderSvg(scene: Scene): string {
  const body = scene.panels.map(panelSvg).join("\n");
  const title = `<text x="${fmt(scene.width / 2)}" y="22" text-anchor="middle" ` +
    `font-size="14" font-family="sans-serif">${esc(scene.title)}</text>`;
  return `<?xml version="1.0" encoding="UTF-8"?>\n` +
    `<svg xmlns="http://www.w3.org/2000/svg" width="${scene.width}" ` +
    `height="${scene.height}" viewBox="0 0 ${scene.width} ${scene.height}">\n` +
    `<rect width="${scene.width}" height="${scene.height}" fill="#ffffff"/>\n` +
    `${title}\n${body}\n</svg>\n`;
}
