#!/usr/bin/env node
// plots --in runs/*.csv [--summary summary.json] --out figs/ [--format svg] [--bins 20]

import { renderReport, FigureKind } from "./report.js";

function usage(): never {
  console.error(
    "usage: plots --in <trials.csv>... [--summary summary.json] --out <dir> " +
    "[--format svg] [--bins 20] [--kinds hist,rates,ks,accuracy]",
  );
  process.exit(2);
}

export function main(argv: string[]): number {
  const inputs: string[] = [];
  let outDir: string | undefined;
  let summaryPath: string | undefined;
  let format: "svg" | "png" = "svg";
  let bins = 20;
  let kinds: FigureKind[] | undefined;

  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    const next = () => {
      i += 1;
      if (i >= argv.length) usage();
      return argv[i];
    };
    switch (arg) {
      case "--in":
        inputs.push(next());
        while (i + 1 < argv.length && !argv[i + 1].startsWith("--")) inputs.push(argv[++i]);
        break;
      case "--summary":
        summaryPath = next();
        break;
      case "--out":
        outDir = next();
        break;
      case "--format": {
        const f = next();
        if (f !== "svg" && f !== "png") usage();
        format = f;
        break;
      }
      case "--bins":
        bins = Number(next());
        break;
      case "--kinds":
        kinds = next().split(",") as FigureKind[];
        break;
      default:
        usage();
    }
  }
  if (inputs.length === 0 || !outDir) usage();
  try {
    const report = renderReport({ inputs, outDir, summaryPath, format, bins, kinds });
    console.log(`wrote ${report.files.length} figures and ${report.indexPath}`);
    return 0;
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 1;
  }
}

if (process.argv[1] && /cli\.(js|ts)$/.test(process.argv[1])) {
  process.exit(main(process.argv.slice(2)));
}
