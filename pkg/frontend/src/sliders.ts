// Elicitation slider state. Each dimension holds five integer percentages
// that always sum to exactly 100; submission converts them to the soft
// answer weights the API expects.

export function pointMediumPercents(): number[] {
  return [0, 0, 100, 0, 0];
}

/**
 * Rescale raw slider values to integer percentages summing to exactly 100
 * (largest-remainder rounding; an all-zero vector resets to point-Medium).
 */
export function normalizePercents(values: number[]): number[] {
  if (values.length !== 5) {
    throw new Error(`expected 5 slider values, got ${values.length}`);
  }
  const clamped = values.map((v) => (Number.isFinite(v) && v > 0 ? v : 0));
  const total = clamped.reduce((a, b) => a + b, 0);
  if (total === 0) {
    return pointMediumPercents();
  }
  const scaled = clamped.map((v) => (v / total) * 100);
  const floors = scaled.map(Math.floor);
  let remainder = 100 - floors.reduce((a, b) => a + b, 0);
  const order = scaled
    .map((v, i) => ({ frac: v - floors[i], i }))
    .sort((a, b) => b.frac - a.frac || a.i - b.i);
  const result = [...floors];
  for (let k = 0; k < order.length && remainder > 0; k += 1, remainder -= 1) {
    result[order[k].i] += 1;
  }
  return result;
}

/** Soft answer weights for the API: {level: percent/100}, zeros omitted. */
export function percentsToWeights(
  percents: number[],
  levels: readonly string[],
): Record<string, number> {
  const weights: Record<string, number> = {};
  percents.forEach((pct, i) => {
    if (pct > 0) {
      weights[levels[i]] = pct / 100;
    }
  });
  return weights;
}

export interface NumericFields {
  kloc: number;
  hours_booked: number;
  horizon_months: number;
}

export function validateNumericFields(fields: NumericFields): string | null {
  if (!(fields.kloc >= 0)) {
    return "kloc must be a nonnegative number";
  }
  if (!(fields.hours_booked >= 0)) {
    return "hours_booked must be a nonnegative number";
  }
  if (!Number.isInteger(fields.horizon_months) || fields.horizon_months < 1) {
    return "horizon_months must be a positive integer";
  }
  return null;
}
