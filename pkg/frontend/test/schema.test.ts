import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import { parseTrialCsv } from "../src/schema.js";

const FIXTURE = new URL("./fixtures/realizable7.csv", import.meta.url).pathname;

describe("parseTrialCsv", () => {
  it("parses the harness fixture", () => {
    const records = parseTrialCsv(readFileSync(FIXTURE, "utf8"));
    expect(records).toHaveLength(60);
    expect(records[0].n).toBe(7);
    expect(records[0].estimator).toBe("exact");
    for (const r of records) {
      expect(r.p_selective).toBeGreaterThanOrEqual(0);
      expect(r.p_selective).toBeLessThanOrEqual(r.p_naive);
    }
  });

  it("decodes inf and boolean cells", () => {
    const text = [
      "trial,seed,n,p,K,H,K_null,H_null,level,estimator,matched_null,T,beta,p_selective,p_naive,residue,degenerate,elapsed_ms",
      "0,1,2,2,1,1,1,1,1,exact,1,0.5,inf,1.0,1.0,0.0,0,0.1",
    ].join("\n");
    const [r] = parseTrialCsv(text);
    expect(r.beta).toBe(Infinity);
    expect(r.matched_null).toBe(true);
    expect(r.degenerate).toBe(false);
  });

  it("names missing columns on schema mismatch", () => {
    const text = "trial,seed,n,p\n0,1,2,2";
    expect(() => parseTrialCsv(text)).toThrow(/missing columns: .*p_selective/);
  });

  it("rejects ragged rows", () => {
    const good = readFileSync(FIXTURE, "utf8").split("\n")[0];
    expect(() => parseTrialCsv(good + "\n1,2,3")).toThrow(/expected 18 cells/);
  });
});
