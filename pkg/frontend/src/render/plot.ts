/** Entropy and ACR line plot with dashed segment boundaries. */

import type { ModelDocument } from "../types.js";

const W = 860;
const H = 260;
const PAD = { left: 44, right: 16, top: 26, bottom: 30 };

function x(pos: number, width: number): number {
  // nybble positions 1..width, centred on their slot
  return PAD.left + ((pos - 0.5) / width) * (W - PAD.left - PAD.right);
}

function y(value: number): number {
  return PAD.top + (1 - value) * (H - PAD.top - PAD.bottom);
}

function polyline(values: number[], cls: string): string {
  const pts = values
    .map((v, i) => `${x(i + 1, values.length).toFixed(1)},${y(v).toFixed(1)}`)
    .join(" ");
  return `<polyline class="${cls}" points="${pts}" />`;
}

export function entropyPlotSvg(model: ModelDocument): string {
  const entropies = model.profile.entropies.map(Number);
  const acr = model.profile.acr.map(Number);
  const width = entropies.length;
  const parts: string[] = [];
  parts.push(
    `<svg viewBox="0 0 ${W} ${H}" role="img" aria-label="entropy by nybble">`,
  );
  // y axis with a few gridlines
  for (const tick of [0, 0.25, 0.5, 0.75, 1]) {
    parts.push(
      `<line class="grid" x1="${PAD.left}" y1="${y(tick)}" x2="${W - PAD.right}" y2="${y(tick)}" />`,
      `<text class="tick" x="${PAD.left - 6}" y="${y(tick) + 4}" text-anchor="end">${tick}</text>`,
    );
  }
  // segment boundaries (dashed) and letters at the top
  for (const seg of model.segments) {
    if (seg.start > 1) {
      const bx = x(seg.start - 0.5, width) + 0; // between the two positions
      parts.push(
        `<line class="boundary" x1="${bx.toFixed(1)}" y1="${PAD.top - 14}" x2="${bx.toFixed(1)}" y2="${H - PAD.bottom}" />`,
      );
    }
    const cx = (x(seg.start, width) + x(seg.end, width)) / 2;
    parts.push(
      `<text class="seg-letter" x="${cx.toFixed(1)}" y="${PAD.top - 8}" text-anchor="middle">${seg.label}</text>`,
    );
  }
  parts.push(polyline(entropies, "entropy-line"));
  parts.push(polyline(acr, "acr-line"));
  // x axis labels every 4 positions
  for (let pos = 4; pos <= width; pos += 4) {
    parts.push(
      `<text class="tick" x="${x(pos, width).toFixed(1)}" y="${H - 10}" text-anchor="middle">${pos}</text>`,
    );
  }
  parts.push("</svg>");
  return parts.join("");
}
