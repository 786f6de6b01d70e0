import { describe, expect, it } from "vitest";

import { PanelFlight } from "../src/flight.js";
import { el } from "./helpers.js";

describe("panel flight control", () => {
  it("marks the panel busy while in flight", () => {
    const root = el();
    const flight = new PanelFlight(root);
    const token = flight.begin();
    expect(root.classList.contains("loading")).toBe(true);
    expect(root.getAttribute("aria-busy")).toBe("true");
    expect(flight.land(token)).toBe(true);
    expect(root.classList.contains("loading")).toBe(false);
  });

  it("drops superseded responses (cancel-and-replace)", () => {
    const root = el();
    const flight = new PanelFlight(root);
    const stale = flight.begin();
    const fresh = flight.begin();
    expect(flight.land(stale)).toBe(false);
    expect(root.classList.contains("loading")).toBe(true); // still waiting for fresh
    expect(flight.land(fresh)).toBe(true);
    expect(root.classList.contains("loading")).toBe(false);
  });
});
