// Pure metric computations over trial records.

import { TrialRecord } from "./schema.js";

export interface Histogram {
  edges: number[]; // length bins + 1
  counts: number[]; // length bins
  total: number;
}

export function histogramUnit(values: number[], bins: number): Histogram {
  const counts = new Array<number>(bins).fill(0);
  for (const v of values) {
    let b = Math.floor(v * bins);
    if (b >= bins) b = bins - 1; // v = 1 lands in the last bin
    if (b < 0) b = 0;
    counts[b] += 1;
  }
  const edges = Array.from({ length: bins + 1 }, (_, i) => i / bins);
  return { edges, counts, total: values.length };
}

// sqrt(r) * sup-distance of the empirical CDF from Uniform[0,1]
export function ksUniformStatistic(values: number[]): number {
  if (values.length === 0) throw new Error("ksUniformStatistic: empty sample");
  const p = [...values].sort((a, b) => a - b);
  const r = p.length;
  let d = 0;
  for (let i = 1; i <= r; i++) {
    d = Math.max(d, Math.abs(i / r - p[i - 1]), Math.abs(p[i - 1] - (i - 1) / r));
  }
  return d * Math.sqrt(r);
}

export interface SizeMetrics {
  size: number; // matrix dimension n
  nullTrials: number;
  alternativeTrials: number;
  accuracy: number;
  ksSelective: number | null;
  ksNaive: number | null;
  fprSelective: Map<number, number | null>;
  fprNaive: Map<number, number | null>;
  tprSelective: Map<number, number | null>;
  tprNaive: Map<number, number | null>;
}

export function metricsBySize(records: TrialRecord[], alphas: number[]): SizeMetrics[] {
  const sizes = [...new Set(records.map((r) => r.n))].sort((a, b) => a - b);
  return sizes.map((size) => {
    const rs = records.filter((r) => r.n === size);
    const nulls = rs.filter((r) => r.matched_null);
    const alts = rs.filter((r) => !r.matched_null);
    const rate = (subset: TrialRecord[], alpha: number, field: "p_selective" | "p_naive") =>
      subset.length === 0 ? null : subset.filter((r) => r[field] <= alpha).length / subset.length;
    const perAlpha = (subset: TrialRecord[], field: "p_selective" | "p_naive") =>
      new Map(alphas.map((a) => [a, rate(subset, a, field)]));
    return {
      size,
      nullTrials: nulls.length,
      alternativeTrials: alts.length,
      accuracy: nulls.length / rs.length,
      ksSelective: nulls.length > 0 ? ksUniformStatistic(nulls.map((r) => r.p_selective)) : null,
      ksNaive: nulls.length > 0 ? ksUniformStatistic(nulls.map((r) => r.p_naive)) : null,
      fprSelective: perAlpha(nulls, "p_selective"),
      fprNaive: perAlpha(nulls, "p_naive"),
      tprSelective: perAlpha(alts, "p_selective"),
      tprNaive: perAlpha(alts, "p_naive"),
    };
  });
}

export function nullPValues(records: TrialRecord[], field: "p_selective" | "p_naive"): number[] {
  return records.filter((r) => r.matched_null).map((r) => r[field]);
}
