// What-if overlay: base vs forced target means side by side. Exploration is
// read-only on the server; the evidence version is displayed so it is
// visible that repeated what-ifs never commit anything.

import { escapeHtml, fmtMean, numberSpan } from "../format.js";
import type { WhatIfResponse } from "../types.js";

function meanCell(kind: string, node: string, mean: number | undefined): string {
  if (mean === undefined) {
    return `<td class="${kind}">-</td>`;
  }
  return `<td class="${kind}" data-node="${escapeHtml(node)}">${numberSpan(mean, fmtMean(mean), `${kind}-mean`)}</td>`;
}

export function renderWhatIf(root: HTMLElement, response: WhatIfResponse): void {
  const nodes = Object.keys(response.base.posteriors);
  const rows = nodes
    .map((node) => {
      const base = response.base.posteriors[node].mean;
      const forced = response.whatif.posteriors[node].mean;
      return `<tr data-node="${escapeHtml(node)}">
        <th>${escapeHtml(node)}</th>
        ${meanCell("base", node, base)}
        ${meanCell("whatif", node, forced)}
      </tr>`;
    })
    .join("");
  root.innerHTML = `
    <div class="whatif-header">
      What if <code>${escapeHtml(response.node)}</code> were
      <code>${escapeHtml(response.state)}</code>?
      <span class="evidence-version" data-version="${response.version}">evidence v${response.version}</span>
    </div>
    <table class="whatif-table">
      <thead><tr><th>target</th><th>base mean</th><th>what-if mean</th></tr></thead>
      <tbody>${rows}</tbody>
    </table>`;
}

export function renderWhatIfImpossible(root: HTMLElement, node: string, state: string,
                                       message: string): void {
  root.innerHTML = `
    <div class="error inline-error" data-impossible="true">
      <code>${escapeHtml(node)} = ${escapeHtml(state)}</code> contradicts the
      committed evidence and cannot be charted. ${escapeHtml(message)}
    </div>`;
}
