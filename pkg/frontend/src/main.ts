// Application wiring: elicitation form -> session -> prediction panel,
// with what-if exploration and the tornado view on the side.

import { ApiClient, ApiError } from "./api.js";
import { PanelFlight } from "./flight.js";
import { escapeHtml } from "./format.js";
import { renderPrediction, renderPredictionError } from "./panels/prediction.js";
import { renderTornado, renderTornadoError } from "./panels/tornado.js";
import { renderWhatIf, renderWhatIfImpossible } from "./panels/whatif.js";
import { defaultFormState, toScenarioBody, type FormState } from "./scenario.js";
import { normalizePercents } from "./sliders.js";
import {
  COMPLEXITY_DIMENSION,
  FIELD_NODE,
  QUALITY_LEVELS,
  SCENARIO_DIMENSIONS,
  USAGE_LEVELS,
  type RatingScalesResponse,
} from "./types.js";

const WHATIF_NODES = [
  "verification_quality",
  "development_quality",
  "problem_complexity",
  "certification_type",
  "usage_level",
];

function sliderGroup(dim: string, levels: readonly string[], tooltips: Record<string, string>): string {
  const sliders = levels
    .map(
      (level, i) => `
      <label class="slider" title="${escapeHtml(tooltips[level] ?? "")}">
        <span>${escapeHtml(level)}</span>
        <input type="range" min="0" max="100" step="1"
               value="${i === 2 ? 100 : 0}"
               data-dim="${escapeHtml(dim)}" data-index="${i}">
        <span class="pct" data-pct="${escapeHtml(dim)}:${i}">${i === 2 ? 100 : 0}%</span>
      </label>`,
    )
    .join("");
  return `<fieldset class="dimension" data-dimension="${escapeHtml(dim)}">
    <legend>${escapeHtml(dim)}</legend>${sliders}
    <span class="sum" data-sum="${escapeHtml(dim)}">100%</span>
  </fieldset>`;
}

export class App {
  private form: FormState = defaultFormState();
  private sessionId: string | null = null;
  private predictionFlight!: PanelFlight;
  private whatIfFlight!: PanelFlight;
  private tornadoFlight!: PanelFlight;

  constructor(
    private readonly root: HTMLElement,
    private readonly client: ApiClient,
  ) {}

  async start(): Promise<void> {
    let scales: RatingScalesResponse = { scales: [] };
    try {
      scales = await this.client.ratingScales();
    } catch {
      // Tooltips are a nicety; the form works without them.
    }
    const tooltips: Record<string, Record<string, string>> = {};
    for (const scale of scales.scales) {
      tooltips[scale.dimension] = scale.levels;
    }
    this.renderSkeleton(tooltips);
    this.bind();
  }

  private renderSkeleton(tooltips: Record<string, Record<string, string>>): void {
    const dims = [...SCENARIO_DIMENSIONS, COMPLEXITY_DIMENSION]
      .map((dim) => sliderGroup(dim, QUALITY_LEVELS, tooltips[dim] ?? {}))
      .join("");
    this.root.innerHTML = `
      <h1>Defect-prediction workbench</h1>
      <div class="layout">
        <form id="scenario-form">
          ${dims}
          ${sliderGroup("usage_level", USAGE_LEVELS, {})}
          <fieldset class="numbers">
            <label>new/changed KLoC
              <input type="number" id="kloc" min="0" step="0.1" value="50"></label>
            <label>hours booked
              <input type="number" id="hours" min="0" step="1" value="20000"></label>
            <label>horizon (months)
              <input type="number" id="horizon" min="1" step="1" value="12"></label>
            <label>certification
              <select id="certification">
                <option value="">unknown</option>
                <option value="no">no</option>
                <option value="planned">planned</option>
                <option value="yes">yes</option>
              </select></label>
          </fieldset>
          <button type="submit" id="submit">Predict</button>
          <div id="form-error" class="error"></div>
        </form>
        <div class="panels">
          <section id="prediction-panel" class="panel" aria-busy="false"></section>
          <section id="whatif-panel" class="panel" aria-busy="false">
            <div class="whatif-controls">
              <select id="whatif-node">
                ${WHATIF_NODES.map((n) => `<option>${n}</option>`).join("")}
              </select>
              <select id="whatif-state">
                ${QUALITY_LEVELS.map((s) => `<option>${s}</option>`).join("")}
              </select>
              <button type="button" id="whatif-run" disabled>What if?</button>
            </div>
            <div id="whatif-result"></div>
          </section>
          <section id="tornado-panel" class="panel" aria-busy="false">
            <div class="tornado-controls">
              <input id="tornado-target" value="${FIELD_NODE}">
              <button type="button" id="tornado-run" disabled>Tornado</button>
            </div>
            <div id="tornado-result"></div>
          </section>
        </div>
      </div>`;
    this.predictionFlight = new PanelFlight(this.q("#prediction-panel"));
    this.whatIfFlight = new PanelFlight(this.q("#whatif-panel"));
    this.tornadoFlight = new PanelFlight(this.q("#tornado-panel"));
  }

  private q<T extends HTMLElement = HTMLElement>(selector: string): T {
    const el = this.root.querySelector<T>(selector);
    if (!el) {
      throw new Error(`missing element ${selector}`);
    }
    return el;
  }

  private bind(): void {
    this.root.querySelectorAll<HTMLInputElement>("input[type=range]").forEach((input) => {
      input.addEventListener("input", () => this.onSlider(input.dataset.dim!));
    });
    this.q<HTMLFormElement>("#scenario-form").addEventListener("submit", (event) => {
      event.preventDefault();
      void this.submit();
    });
    this.q("#whatif-run").addEventListener("click", () => void this.runWhatIf());
    this.q("#tornado-run").addEventListener("click", () => void this.runTornado());
  }

  /** Renormalize one dimension's sliders so displayed percentages sum to 100. */
  private onSlider(dim: string): void {
    const inputs = Array.from(
      this.root.querySelectorAll<HTMLInputElement>(`input[data-dim="${dim}"]`),
    );
    const values = inputs.map((i) => Number(i.value));
    const percents = normalizePercents(values);
    if (dim === "usage_level") {
      this.form.usagePercents = percents;
    } else {
      this.form.dimensionPercents[dim] = percents;
    }
    percents.forEach((pct, i) => {
      const cell = this.root.querySelector(`[data-pct="${dim}:${i}"]`);
      if (cell) {
        cell.textContent = `${pct}%`;
      }
    });
    const sum = this.root.querySelector(`[data-sum="${dim}"]`);
    if (sum) {
      sum.textContent = `${percents.reduce((a, b) => a + b, 0)}%`;
    }
  }

  private readNumericFields(): string | null {
    this.form.numeric = {
      kloc: Number(this.q<HTMLInputElement>("#kloc").value),
      hours_booked: Number(this.q<HTMLInputElement>("#hours").value),
      horizon_months: Number(this.q<HTMLInputElement>("#horizon").value),
    };
    this.form.certification = this.q<HTMLSelectElement>("#certification").value || null;
    if (!(this.form.numeric.kloc >= 0) || !(this.form.numeric.hours_booked >= 0)) {
      return "size fields must be nonnegative";
    }
    if (!Number.isInteger(this.form.numeric.horizon_months) ||
        this.form.numeric.horizon_months < 1) {
      return "horizon must be a positive integer";
    }
    return null;
  }

  async submit(): Promise<void> {
    const formError = this.q("#form-error");
    formError.textContent = "";
    const invalid = this.readNumericFields();
    if (invalid) {
      formError.textContent = invalid;
      return;
    }
    const token = this.predictionFlight.begin();
    try {
      const session = await this.client.createScenarioSession(toScenarioBody(this.form));
      const report = await this.client.predict(session.session_id);
      if (!this.predictionFlight.land(token)) {
        return; // superseded by a newer submit
      }
      this.sessionId = session.session_id;
      renderPrediction(this.q("#prediction-panel"), report);
      this.q<HTMLButtonElement>("#whatif-run").disabled = false;
      this.q<HTMLButtonElement>("#tornado-run").disabled = false;
    } catch (err) {
      if (!this.predictionFlight.land(token)) {
        return;
      }
      if (err instanceof ApiError) {
        formError.textContent = err.message;
        renderPredictionError(this.q("#prediction-panel"), err.message);
      } else {
        formError.textContent = String(err);
      }
    }
  }

  async runWhatIf(): Promise<void> {
    if (!this.sessionId) {
      return;
    }
    const node = this.q<HTMLSelectElement>("#whatif-node").value;
    const state = this.q<HTMLSelectElement>("#whatif-state").value;
    const target = this.q("#whatif-result");
    const token = this.whatIfFlight.begin();
    try {
      const response = await this.client.whatIf(this.sessionId, node, state);
      if (this.whatIfFlight.land(token)) {
        renderWhatIf(target, response);
      }
    } catch (err) {
      if (!this.whatIfFlight.land(token)) {
        return;
      }
      if (err instanceof ApiError && err.status === 409) {
        renderWhatIfImpossible(target, node, state, err.message);
      } else {
        target.innerHTML = `<div class="error inline-error">${escapeHtml(String(err))}</div>`;
      }
    }
  }

  async runTornado(): Promise<void> {
    if (!this.sessionId) {
      return;
    }
    const target = this.q<HTMLInputElement>("#tornado-target").value;
    const resultEl = this.q("#tornado-result");
    const token = this.tornadoFlight.begin();
    try {
      const response = await this.client.sensitivity(this.sessionId, target, WHATIF_NODES
        .filter((n) => n !== target));
      if (this.tornadoFlight.land(token)) {
        renderTornado(resultEl, response);
      }
    } catch (err) {
      if (!this.tornadoFlight.land(token)) {
        return;
      }
      if (err instanceof ApiError) {
        renderTornadoError(resultEl, err.status, err.message);
      } else {
        resultEl.innerHTML = `<div class="error inline-error">${escapeHtml(String(err))}</div>`;
      }
    }
  }
}

export function mount(root: HTMLElement, baseUrl = ""): App {
  const app = new App(root, new ApiClient(baseUrl));
  void app.start();
  return app;
}

declare global {
  interface Window {
    heisenbnMount?: typeof mount;
  }
}

if (typeof window !== "undefined") {
  window.heisenbnMount = mount;
  const root = document.getElementById("app");
  if (root) {
    const params = new URLSearchParams(window.location.search);
    mount(root, params.get("api") ?? "");
  }
}
