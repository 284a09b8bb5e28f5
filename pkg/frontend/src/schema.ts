// Trial CSV schema shared with the simulation harness, plus the summary JSON shape.

export const CSV_COLUMNS = [
  "trial", "seed", "n", "p", "K", "H", "K_null", "H_null", "level", "estimator",
  "matched_null", "T", "beta", "p_selective", "p_naive", "residue", "degenerate",
  "elapsed_ms",
] as const;

export interface TrialRecord {
  trial: number;
  seed: string;
  n: number;
  p: number;
  K: number;
  H: number;
  K_null: number;
  H_null: number;
  level: number;
  estimator: string;
  matched_null: boolean;
  T: number;
  beta: number;
  p_selective: number;
  p_naive: number;
  residue: number;
  degenerate: boolean;
  elapsed_ms: number;
}

export interface SummaryJson {
  counts: { total: number; null: number; alternative: number; degenerate: number };
  accuracy: number;
  fpr_selective: Record<string, number | null>;
  fpr_naive: Record<string, number | null>;
  tpr_selective: Record<string, number | null>;
  tpr_naive: Record<string, number | null>;
  ks_selective: number | string | null;
  ks_naive: number | string | null;
}

function parseFloatLoose(raw: string, column: string, line: number): number {
  if (raw === "inf") return Infinity;
  const v = Number(raw);
  if (Number.isNaN(v)) {
    throw new Error(`line ${line}: column '${column}' is not a number: '${raw}'`);
  }
  return v;
}

export function parseTrialCsv(text: string): TrialRecord[] {
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length === 0) throw new Error("empty CSV");
  const header = lines[0].split(",");
  const expected = CSV_COLUMNS as readonly string[];
  if (header.length !== expected.length || header.some((h, i) => h !== expected[i])) {
    const missing = expected.filter((c) => !header.includes(c));
    throw new Error(
      missing.length > 0
        ? `CSV header is missing columns: ${missing.join(", ")}`
        : `CSV header does not match the trial schema: ${header.join(",")}`,
    );
  }
  const records: TrialRecord[] = [];
  for (let i = 1; i < lines.length; i++) {
    const cells = lines[i].split(",");
    if (cells.length !== expected.length) {
      throw new Error(`line ${i + 1}: expected ${expected.length} cells, got ${cells.length}`);
    }
    const cell = (name: string) => cells[expected.indexOf(name)];
    records.push({
      trial: parseFloatLoose(cell("trial"), "trial", i + 1),
      seed: cell("seed"),
      n: parseFloatLoose(cell("n"), "n", i + 1),
      p: parseFloatLoose(cell("p"), "p", i + 1),
      K: parseFloatLoose(cell("K"), "K", i + 1),
      H: parseFloatLoose(cell("H"), "H", i + 1),
      K_null: parseFloatLoose(cell("K_null"), "K_null", i + 1),
      H_null: parseFloatLoose(cell("H_null"), "H_null", i + 1),
      level: parseFloatLoose(cell("level"), "level", i + 1),
      estimator: cell("estimator"),
      matched_null: cell("matched_null") === "1",
      T: parseFloatLoose(cell("T"), "T", i + 1),
      beta: parseFloatLoose(cell("beta"), "beta", i + 1),
      p_selective: parseFloatLoose(cell("p_selective"), "p_selective", i + 1),
      p_naive: parseFloatLoose(cell("p_naive"), "p_naive", i + 1),
      residue: parseFloatLoose(cell("residue"), "residue", i + 1),
      degenerate: cell("degenerate") === "1",
      elapsed_ms: parseFloatLoose(cell("elapsed_ms"), "elapsed_ms", i + 1),
    });
  }
  return records;
}
