// Display formatting. The UI never computes probabilities: every rendered
// number is an API payload field, carried verbatim in a data-raw attribute
// with the visible text derived by these formatters alone.

export function raw(value: number): string {
  return String(value);
}

export function fmtMean(value: number): string {
  return value.toFixed(2);
}

export function fmtProbPct(p: number): string {
  return `${(p * 100).toFixed(1)}%`;
}

export function fmtRange(value: number): string {
  return value.toFixed(3);
}

export function fmtBits(value: number): string {
  return `${value.toFixed(4)} bits`;
}

/** A span carrying the exact payload value alongside its formatted text. */
export function numberSpan(value: number, formatted: string, cls: string): string {
  return `<span class="${cls}" data-raw="${raw(value)}">${formatted}</span>`;
}

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}
