import { describe, expect, it } from "vitest";

import { fmtRange } from "../src/format.js";
import { renderTornado, renderTornadoError } from "../src/panels/tornado.js";
import type { SensitivityResponse } from "../src/types.js";
import { el, fixture } from "./helpers.js";

const payload = fixture<SensitivityResponse>("sensitivity_a.json");

describe("tornado view", () => {
  it("keeps exactly the API's input order", () => {
    const root = el();
    renderTornado(root, payload);
    const rows = Array.from(root.querySelectorAll(".tornado-row")).map(
      (row) => (row as HTMLElement).dataset.input,
    );
    expect(rows).toEqual(payload.inputs.map((i) => i.input));
  });

  it("lists zero-range inputs with zero-width bars", () => {
    const root = el();
    renderTornado(root, payload);
    const zeroInputs = payload.inputs.filter((i) => i.range === 0);
    expect(zeroInputs.length).toBeGreaterThan(0);
    for (const input of zeroInputs) {
      const row = root.querySelector(`[data-input="${input.input}"]`)!;
      const fill = row.querySelector(".tornado-fill") as HTMLElement;
      expect(fill.style.width).toBe("0%");
      expect(fill.dataset.raw).toBe(String(input.range));
    }
  });

  it("range and mutual-information cells carry exact payload values", () => {
    const root = el();
    renderTornado(root, payload);
    for (const input of payload.inputs) {
      const row = root.querySelector(`[data-input="${input.input}"]`)!;
      const range = row.querySelector(".tornado-range") as HTMLElement;
      const mi = row.querySelector(".tornado-mi") as HTMLElement;
      expect(range.dataset.raw).toBe(String(input.range));
      expect(range.textContent).toBe(fmtRange(input.range));
      expect(mi.dataset.raw).toBe(String(input.mutual_information));
    }
  });

  it("marks skipped sweep states", () => {
    const root = el();
    renderTornado(root, payload);
    const anySkipped = payload.inputs.some((i) => i.sweeps.some((s) => s.skipped));
    expect(anySkipped).toBe(true);
    expect(root.querySelectorAll(".sweep.skipped").length).toBeGreaterThan(0);
  });

  it("renders an explanatory empty state for no inputs", () => {
    const root = el();
    renderTornado(root, { target: "x", base_mean: 0, inputs: [] });
    expect(root.querySelector(".empty-state")).not.toBeNull();
  });

  it("shows unknown-target errors inline", () => {
    const root = el();
    renderTornadoError(root, 404, "unknown node 'not_a_node'");
    const box = root.querySelector(".inline-error") as HTMLElement;
    expect(box.dataset.status).toBe("404");
    expect(box.textContent).toContain("not_a_node");
  });
});
