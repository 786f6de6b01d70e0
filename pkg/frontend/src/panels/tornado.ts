// Tornado chart: one horizontal bar per input, in exactly the API's order
// (already ranked by range, descending). Zero-range inputs keep their row
// with a zero-width bar; skipped states are listed in the detail line.

import { escapeHtml, fmtBits, fmtMean, fmtRange, numberSpan, raw } from "../format.js";
import type { SensitivityResponse } from "../types.js";

export function renderTornado(root: HTMLElement, response: SensitivityResponse): void {
  if (response.inputs.length === 0) {
    root.innerHTML = `<div class="empty-state">No inputs to sweep: pick at least one
      input node that is not the target.</div>`;
    return;
  }
  const maxRange = Math.max(...response.inputs.map((i) => i.range), 0);
  const rows = response.inputs
    .map((input) => {
      const width = maxRange > 0 ? (input.range / maxRange) * 100 : 0;
      const sweeps = input.sweeps
        .map((s) =>
          s.skipped || s.mean === null
            ? `<span class="sweep skipped" data-state="${escapeHtml(s.state)}">${escapeHtml(s.state)}: skipped</span>`
            : `<span class="sweep" data-state="${escapeHtml(s.state)}">${escapeHtml(s.state)}: ${numberSpan(s.mean, fmtMean(s.mean), "sweep-mean")}</span>`,
        )
        .join(" ");
      return `
      <div class="tornado-row" data-input="${escapeHtml(input.input)}">
        <div class="tornado-label">${escapeHtml(input.input)}</div>
        <div class="tornado-track">
          <div class="tornado-fill" style="width:${width}%" data-raw="${raw(input.range)}"></div>
        </div>
        ${numberSpan(input.range, fmtRange(input.range), "tornado-range")}
        ${numberSpan(input.mutual_information, fmtBits(input.mutual_information), "tornado-mi")}
        <div class="tornado-sweeps">${sweeps}</div>
      </div>`;
    })
    .join("");
  root.innerHTML = `
    <div class="tornado-header">Target <code>${escapeHtml(response.target)}</code>,
      base mean ${numberSpan(response.base_mean, fmtMean(response.base_mean), "tornado-base")}</div>
    ${rows}`;
}

export function renderTornadoError(root: HTMLElement, status: number, message: string): void {
  root.innerHTML = `<div class="error inline-error" data-status="${status}">
    ${status === 404 ? "Unknown target node." : "Sensitivity request failed."}
    ${escapeHtml(message)}</div>`;
}
