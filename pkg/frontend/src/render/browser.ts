/** Conditional probability browser: one clickable column per segment.
 *
 * Every number shown is copied verbatim from the query response
 * (`p_display`, `display`); this module formats nothing itself.
 */

import { heatColor, heatTextColor } from "../heat.js";
import type { Evidence, QueryResponse } from "../types.js";

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function probabilityBrowserHtml(
  response: QueryResponse,
  evidence: Evidence,
): string {
  const columns = response.segments.map((seg) => {
    const cells = seg.codes.map((code) => {
      const active = evidence[seg.label] === code.id;
      const style = `background:${heatColor(code.p)};color:${heatTextColor(code.p)}`;
      return (
        `<button class="code-cell${active ? " evidence" : ""}" style="${style}"` +
        ` data-label="${seg.label}" data-code="${code.id}"` +
        ` title="${seg.label} = ${escapeHtml(code.display)}">` +
        `<span class="code-value">${escapeHtml(code.display)}</span>` +
        `<span class="code-p">${escapeHtml(code.p_display)}</span>` +
        `</button>`
      );
    });
    const span =
      seg.start === seg.end ? `${seg.start}` : `${seg.start}-${seg.end}`;
    return (
      `<div class="segment-column" data-label="${seg.label}">` +
      `<div class="segment-head"><b>${seg.label}</b><small>${span}</small></div>` +
      cells.join("") +
      `</div>`
    );
  });
  return `<div class="browser-grid">${columns.join("")}</div>`;
}
