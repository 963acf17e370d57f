/** Segment dependency graph: nodes left to right in address order,
 * one arrow per learned parent relation, edges touching evidence
 * segments highlighted. */

import type { Evidence, ModelDocument } from "../types.js";

const NODE_R = 17;
const H = 150;
const BASELINE = 105;

export interface GraphEdge {
  from: string;
  to: string;
}

export function graphEdges(model: ModelDocument): GraphEdge[] {
  const edges: GraphEdge[] = [];
  for (const node of model.bn.nodes) {
    for (const parent of node.parents) {
      edges.push({ from: parent, to: node.label });
    }
  }
  return edges;
}

export function bnGraphSvg(model: ModelDocument, evidence: Evidence): string {
  const labels = model.bn.nodes.map((n) => n.label);
  const gap = 72;
  const width = Math.max(labels.length * gap + 30, 200);
  const cx = (label: string) => 40 + labels.indexOf(label) * gap;
  const parts: string[] = [
    `<svg viewBox="0 0 ${width} ${H}" role="img" aria-label="segment dependencies">`,
    `<defs>` +
      `<marker id="arrow" viewBox="0 0 8 8" refX="7" refY="4" markerWidth="7" markerHeight="7" orient="auto">` +
      `<path d="M0,0 L8,4 L0,8 z" fill="currentColor"/></marker>` +
      `</defs>`,
  ];
  for (const edge of graphEdges(model)) {
    const x1 = cx(edge.from);
    const x2 = cx(edge.to);
    const highlighted =
      edge.from in evidence || edge.to in evidence ? " highlighted" : "";
    const span = Math.abs(x2 - x1);
    const lift = Math.min(26 + span / 5, 74);
    const y0 = BASELINE - NODE_R - 2;
    parts.push(
      `<path class="edge${highlighted}" data-from="${edge.from}" data-to="${edge.to}"` +
        ` d="M ${x1} ${y0} C ${x1} ${BASELINE - lift}, ${x2} ${BASELINE - lift}, ${x2} ${y0}"` +
        ` marker-end="url(#arrow)" />`,
    );
  }
  for (const label of labels) {
    const x = cx(label);
    const withEvidence = label in evidence ? " evidence" : "";
    parts.push(
      `<g class="node${withEvidence}" data-label="${label}">` +
        `<circle cx="${x}" cy="${BASELINE}" r="${NODE_R}" />` +
        `<text x="${x}" y="${BASELINE + 5}" text-anchor="middle">${label}</text>` +
        `</g>`,
    );
  }
  parts.push("</svg>");
  return parts.join("");
}
