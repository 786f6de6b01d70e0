// Assemble the scenario request body from form state.

import { normalizePercents, percentsToWeights, type NumericFields } from "./sliders.js";
import {
  COMPLEXITY_DIMENSION,
  QUALITY_LEVELS,
  SCENARIO_DIMENSIONS,
  USAGE_LEVELS,
  type ScenarioBody,
} from "./types.js";

export interface FormState {
  dimensionPercents: Record<string, number[]>; // 9 scenario dims + complexity
  usagePercents: number[];
  numeric: NumericFields;
  certification: string | null;
}

export function defaultFormState(): FormState {
  const dims: Record<string, number[]> = {};
  for (const dim of SCENARIO_DIMENSIONS) {
    dims[dim] = [0, 0, 100, 0, 0];
  }
  dims[COMPLEXITY_DIMENSION] = [0, 0, 100, 0, 0];
  return {
    dimensionPercents: dims,
    usagePercents: [0, 0, 100, 0, 0],
    numeric: { kloc: 50, hours_booked: 20000, horizon_months: 12 },
    certification: null,
  };
}

export function toScenarioBody(form: FormState): ScenarioBody {
  const answers: ScenarioBody["answers"] = {};
  for (const dim of SCENARIO_DIMENSIONS) {
    answers[dim] = percentsToWeights(
      normalizePercents(form.dimensionPercents[dim]),
      QUALITY_LEVELS,
    );
  }
  const body: ScenarioBody = {
    answers,
    complexity_answer: percentsToWeights(
      normalizePercents(form.dimensionPercents[COMPLEXITY_DIMENSION]),
      QUALITY_LEVELS,
    ),
    kloc: form.numeric.kloc,
    hours_booked: form.numeric.hours_booked,
    usage_level: percentsToWeights(normalizePercents(form.usagePercents), USAGE_LEVELS),
    horizon_months: form.numeric.horizon_months,
  };
  if (form.certification) {
    body.certification = form.certification;
  }
  return body;
}
