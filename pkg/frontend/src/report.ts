// Batch renderer: trial CSVs in, SVG figures + index page out.

import * as fs from "node:fs";
import * as path from "node:path";

import { parseTrialCsv, SummaryJson, TrialRecord } from "./schema.js";
import { histogramUnit, metricsBySize, nullPValues } from "./stats.js";
import { BarGroup, PALETTE, Series, svgBarGroups, svgHistogram, svgLineChart } from "./svg.js";

export interface ReportSpec {
  inputs: string[];           // trial CSV paths; file stem names the scenario
  outDir: string;
  summaryPath?: string;       // optional metrics JSON, embedded in the index
  bins?: number;              // histogram bins, default 20
  format?: "svg" | "png";
  kinds?: FigureKind[];       // default: all four
  alphas?: number[];
}

export type FigureKind = "hist" | "rates" | "ks" | "accuracy";

const ALL_KINDS: FigureKind[] = ["hist", "rates", "ks", "accuracy"];
const DEFAULT_ALPHAS = [0.1, 0.05, 0.01];

export interface RenderedReport {
  files: string[];
  indexPath: string;
}

function scenarioName(csvPath: string): string {
  return path.basename(csvPath).replace(/\.[^.]*$/, "");
}

function rateSeries(metrics: ReturnType<typeof metricsBySize>, alphas: number[],
                    which: "fpr" | "tpr"): Series[] {
  const series: Series[] = [];
  let colorIdx = 0;
  for (const variant of ["selective", "naive"] as const) {
    for (const alpha of alphas) {
      const points: Array<[number, number]> = [];
      for (const m of metrics) {
        const table = which === "fpr"
          ? (variant === "selective" ? m.fprSelective : m.fprNaive)
          : (variant === "selective" ? m.tprSelective : m.tprNaive);
        const v = table.get(alpha);
        if (v !== null && v !== undefined) points.push([m.size, v]);
      }
      // a series with no defined points is omitted entirely
      if (points.length > 0) {
        series.push({
          label: `${variant} a=${alpha}`,
          color: PALETTE[colorIdx % PALETTE.length],
          points,
        });
      }
      colorIdx += 1;
    }
  }
  return series;
}

function renderScenario(name: string, records: TrialRecord[], spec: Required<Pick<ReportSpec,
                        "bins" | "kinds" | "alphas">>): Map<string, string> {
  const out = new Map<string, string>();
  const metrics = metricsBySize(records, spec.alphas);

  if (spec.kinds.includes("hist")) {
    for (const [variant, field] of [["selective", "p_selective"],
                                    ["naive", "p_naive"]] as const) {
      const pvals = nullPValues(records, field);
      const hist = histogramUnit(pvals, spec.bins);
      out.set(
        `hist_${variant}_${name}`,
        svgHistogram(hist.counts, `${variant} p-values, null trials (${name})`),
      );
    }
  }
  if (spec.kinds.includes("rates")) {
    out.set(`fpr_${name}`, svgLineChart(
      rateSeries(metrics, spec.alphas, "fpr"),
      `false positive rate (${name})`, "matrix size", "FPR", 1.0));
    out.set(`tpr_${name}`, svgLineChart(
      rateSeries(metrics, spec.alphas, "tpr"),
      `true positive rate (${name})`, "matrix size", "TPR", 1.0));
  }
  if (spec.kinds.includes("ks")) {
    const groups: BarGroup[] = metrics
      .filter((m) => m.ksSelective !== null)
      .map((m) => ({
        label: String(m.size),
        bars: [
          { label: "selective", value: m.ksSelective as number, color: PALETTE[0] },
          { label: "naive", value: m.ksNaive as number, color: PALETTE[1] },
        ],
      }));
    out.set(`ks_${name}`, svgBarGroups(
      groups, `KS uniformity statistic, null trials (${name})`, "D sqrt(r)"));
  }
  if (spec.kinds.includes("accuracy")) {
    const points: Array<[number, number]> = metrics.map((m) => [m.size, m.accuracy]);
    out.set(`accuracy_${name}`, svgLineChart(
      [{ label: "accuracy", color: PALETTE[2], points }],
      `fraction of null-matching estimates (${name})`, "matrix size", "accuracy", 1.0));
  }
  return out;
}

function indexHtml(figures: string[], summary: SummaryJson | null): string {
  const imgs = figures
    .map((f) => `    <figure><img src="${f}" alt="${f}"/><figcaption>${f}</figcaption></figure>`)
    .join("\n");
  const summaryBlock = summary
    ? `  <h2>Summary</h2>\n  <pre>${JSON.stringify(summary, null, 2)}</pre>\n`
    : "";
  return `<!doctype html>
<html lang="en">
<head>
  <meta charset="utf-8">
  <title>blockinfer report</title>
  <style>
    body { font-family: sans-serif; margin: 2rem; }
    figure { display: inline-block; margin: 0.5rem; }
    figcaption { font-size: 0.8rem; color: #555; text-align: center; }
  </style>
</head>
<body>
  <h1>blockinfer report</h1>
${imgs}
${summaryBlock}</body>
</html>
`;
}

export function renderReport(spec: ReportSpec): RenderedReport {
  const format = spec.format ?? "svg";
  if (format === "png") {
    throw new Error("png output needs a rasterizer; render svg and convert externally");
  }
  if (spec.inputs.length === 0) throw new Error("no input CSVs given");
  const bins = spec.bins ?? 20;
  if (bins < 1) throw new Error("bins must be >= 1");
  const kinds = spec.kinds ?? ALL_KINDS;
  const alphas = spec.alphas ?? DEFAULT_ALPHAS;

  fs.mkdirSync(spec.outDir, { recursive: true });
  const files: string[] = [];
  for (const input of spec.inputs) {
    const records = parseTrialCsv(fs.readFileSync(input, "utf8"));
    const figures = renderScenario(scenarioName(input), records, { bins, kinds, alphas });
    for (const [stem, svg] of figures) {
      const fileName = `${stem}.${format}`;
      fs.writeFileSync(path.join(spec.outDir, fileName), svg);
      files.push(fileName);
    }
  }
  const summary: SummaryJson | null = spec.summaryPath
    ? (JSON.parse(fs.readFileSync(spec.summaryPath, "utf8")) as SummaryJson)
    : null;
  const indexPath = path.join(spec.outDir, "index.html");
  fs.writeFileSync(indexPath, indexHtml(files, summary));
  return { files, indexPath };
}
