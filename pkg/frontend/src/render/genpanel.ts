/** Candidate generation panel: results table and underrun notice.
 * Address and log-probability strings come from the service verbatim. */

import type { GenerateResponse } from "../types.js";

export function generationTableHtml(response: GenerateResponse): string {
  const rows = response.candidates.map(
    (c) =>
      `<tr><td class="addr">${c.address}</td>` +
      `<td class="logp">${c.log_p_display}</td></tr>`,
  );
  const underrun = response.underrun
    ? `<p class="underrun">model support exhausted: ${response.count} of ` +
      `${response.requested} requested candidates</p>`
    : "";
  return (
    underrun +
    `<table class="candidates"><thead><tr><th>candidate</th>` +
    `<th>log p</th></tr></thead><tbody>${rows.join("")}</tbody></table>`
  );
}
