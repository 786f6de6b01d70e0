import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { fmtMean } from "../src/format.js";
import { renderWhatIf, renderWhatIfImpossible } from "../src/panels/whatif.js";
import type { SessionInfo, WhatIfResponse } from "../src/types.js";
import { el, fakeFetch, fixture } from "./helpers.js";

const high = fixture<WhatIfResponse>("whatif_verification_veryhigh.json");
const low = fixture<WhatIfResponse>("whatif_verification_verylow.json");
const session = fixture<SessionInfo>("session_info.json");

describe("what-if overlay", () => {
  it("shows base and forced means straight from the payload", () => {
    const root = el();
    renderWhatIf(root, high);
    for (const node of Object.keys(high.base.posteriors)) {
      const row = root.querySelector(`tr[data-node="${node}"]`)!;
      const base = row.querySelector(".base-mean") as HTMLElement;
      const forced = row.querySelector(".whatif-mean") as HTMLElement;
      expect(base.dataset.raw).toBe(String(high.base.posteriors[node].mean));
      expect(base.textContent).toBe(fmtMean(high.base.posteriors[node].mean!));
      expect(forced.dataset.raw).toBe(String(high.whatif.posteriors[node].mean));
      expect(forced.textContent).toBe(fmtMean(high.whatif.posteriors[node].mean!));
    }
  });

  it("orders overlays consistently with the API monotonicity", () => {
    // Forcing verification quality VeryHigh must not beat VeryLow on field
    // defects; the payloads carry the ordering, the view only displays it.
    const target = "field_defects_T";
    const forcedHigh = high.whatif.posteriors[target].mean!;
    const forcedLow = low.whatif.posteriors[target].mean!;
    expect(forcedHigh).toBeLessThanOrEqual(forcedLow);
    const root = el();
    renderWhatIf(root, low);
    const cell = root.querySelector(
      `tr[data-node="${target}"] .whatif-mean`,
    ) as HTMLElement;
    expect(Number(cell.dataset.raw)).toBe(forcedLow);
  });

  it("displays the evidence version it was computed against", () => {
    const root = el();
    renderWhatIf(root, high);
    const version = root.querySelector(".evidence-version") as HTMLElement;
    expect(version.dataset.version).toBe(String(high.version));
  });

  it("flags impossible states instead of charting them", () => {
    const root = el();
    renderWhatIfImpossible(root, "certification_type", "no", "contradicts evidence");
    const box = root.querySelector("[data-impossible]")!;
    expect(box.textContent).toContain("certification_type");
    expect(root.querySelector(".whatif-table")).toBeNull();
  });

  it("three consecutive what-ifs never touch session evidence", async () => {
    const sid = session.session_id;
    let whatifCalls = 0;
    const { impl, calls } = fakeFetch({
      [`POST /sessions/${sid}/whatif`]: () => {
        whatifCalls += 1;
        return { status: 200, body: high };
      },
      [`GET /sessions/${sid}`]: () => ({ status: 200, body: session }),
    });
    const client = new ApiClient("", impl);
    const before = (await client.getSession(sid)).version;
    for (const state of ["VeryLow", "Medium", "VeryHigh"]) {
      const response = await client.whatIf(sid, "verification_quality", state);
      expect(response.version).toBe(before);
    }
    const after = (await client.getSession(sid)).version;
    expect(after).toBe(before);
    expect(whatifCalls).toBe(3);
    // No evidence PUT ever went out.
    expect(calls.filter((c) => c.method === "PUT")).toHaveLength(0);
  });
});
