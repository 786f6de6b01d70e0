// Prediction panel: bar charts plus means for the verification-defect and
// field-defect forecasts. Bars are drawn only for states the API gives
// nonzero probability, so a zero-usage scenario shows a single full bar
// at count 0.

import { escapeHtml, fmtMean, fmtProbPct, numberSpan, raw } from "../format.js";
import { FIELD_NODE, FOUND_NODE, type PosteriorEntry, type PosteriorReport } from "../types.js";

const TITLES: Record<string, string> = {
  [FOUND_NODE]: "Defects found in verification",
  [FIELD_NODE]: "Field defects over the horizon",
};

function distributionHtml(node: string, entry: PosteriorEntry): string {
  const rows = entry.states
    .map((state, i) => ({ state, p: entry.probs[i] }))
    .filter(({ p }) => p !== 0)
    .map(
      ({ state, p }) => `
      <div class="bar-row" data-state="${escapeHtml(state)}">
        <div class="bar-label">${escapeHtml(state)}</div>
        <div class="bar-track"><div class="bar-fill" style="width:${p * 100}%" data-raw="${raw(p)}"></div></div>
        ${numberSpan(p, fmtProbPct(p), "bar-value")}
      </div>`,
    )
    .join("");
  const mean =
    entry.mean === undefined
      ? ""
      : `<div class="mean-line">mean ${numberSpan(entry.mean, fmtMean(entry.mean), "mean-value")}</div>`;
  return `
    <section class="distribution" data-node="${escapeHtml(node)}">
      <h3>${escapeHtml(TITLES[node] ?? node)}</h3>
      ${rows}
      ${mean}
    </section>`;
}

export function renderPrediction(root: HTMLElement, report: PosteriorReport): void {
  const sections = [FOUND_NODE, FIELD_NODE]
    .filter((node) => node in report.posteriors)
    .map((node) => distributionHtml(node, report.posteriors[node]));
  root.innerHTML = sections.join("\n");
}

export function renderPredictionError(root: HTMLElement, message: string): void {
  root.innerHTML = `<div class="error inline-error">${escapeHtml(message)}</div>`;
}
