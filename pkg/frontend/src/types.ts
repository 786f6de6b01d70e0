// API payload shapes (mirrors the server's canonical serializations).

export interface PosteriorEntry {
  states: string[];
  probs: number[];
  mean?: number;
  variance?: number;
}

export interface PosteriorReport {
  posteriors: Record<string, PosteriorEntry>;
}

export interface SessionCreated {
  session_id: string;
  kind: string;
  version: number;
}

export interface SessionInfo {
  session_id: string;
  kind: string;
  version: number;
  nodes: string[];
  created_at: number;
}

export interface WhatIfResponse {
  version: number;
  node: string;
  state: string;
  base: PosteriorReport;
  whatif: PosteriorReport;
}

export interface SweepEntry {
  state: string;
  mean: number | null;
  skipped: boolean;
}

export interface SensitivityInput {
  input: string;
  range: number;
  mutual_information: number;
  sweeps: SweepEntry[];
}

export interface SensitivityResponse {
  target: string;
  base_mean: number;
  inputs: SensitivityInput[];
}

export interface RatingScale {
  dimension: string;
  levels: Record<string, string>;
}

export interface RatingScalesResponse {
  scales: RatingScale[];
}

export interface ApiErrorBody {
  error: { type: string; message: string };
}

export type AnswerMap = Record<string, number>;

export interface ScenarioBody {
  answers: Record<string, AnswerMap>;
  complexity_answer: AnswerMap;
  kloc: number;
  hours_booked: number;
  usage_level: AnswerMap;
  horizon_months: number;
  certification?: string;
}

export const QUALITY_LEVELS = ["VeryLow", "Low", "Medium", "High", "VeryHigh"] as const;
export const USAGE_LEVELS = ["None", "Low", "Medium", "High", "VeryHigh"] as const;

export const SCENARIO_DIMENSIONS = [
  "testing_quality",
  "review_quality",
  "verification_type",
  "team_experience",
  "project_management",
  "process_maturity",
  "tool_quality",
  "requirements_stability",
  "domain_novelty",
] as const;

export const COMPLEXITY_DIMENSION = "new_functionality_complexity";

export const FOUND_NODE = "defects_found_verification";
export const FIELD_NODE = "field_defects_T";
