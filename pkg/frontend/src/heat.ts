/** Probability -> colour for the heat map.
 *
 * Probabilities in one segment span orders of magnitude (100% down to
 * well under 1%), so the ramp is driven by log10(p) clamped to
 * [-4, 0] and mapped onto a perceptually even light-to-dark sequence
 * (a viridis-like set of anchor colours, interpolated in RGB).
 */

const ANCHORS: [number, number, number][] = [
  [253, 231, 37], // 1.0
  [94, 201, 98],
  [33, 145, 140],
  [59, 82, 139],
  [68, 1, 84], // 1e-4 and below
];

const LOG_FLOOR = -4;

/** 0 (p<=1e-4) .. 1 (p=1) position on the ramp. */
export function heatPosition(p: number): number {
  if (!(p > 0)) return 0;
  const logp = Math.max(Math.log10(Math.min(p, 1)), LOG_FLOOR);
  return 1 - logp / LOG_FLOOR;
}

export function heatColor(p: number): string {
  const t = 1 - heatPosition(p); // 0 = bright (certain), 1 = dark (rare)
  const scaled = t * (ANCHORS.length - 1);
  const i = Math.min(Math.floor(scaled), ANCHORS.length - 2);
  const frac = scaled - i;
  const lo = ANCHORS[i]!;
  const hi = ANCHORS[i + 1]!;
  const rgb = lo.map((c, k) => Math.round(c + (hi[k]! - c) * frac));
  return `rgb(${rgb[0]}, ${rgb[1]}, ${rgb[2]})`;
}

/** Dark text on bright cells, light text on dark cells. */
export function heatTextColor(p: number): string {
  return heatPosition(p) > 0.55 ? "#1b1b1b" : "#f2f2f2";
}
