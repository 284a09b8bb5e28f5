// Minimal deterministic SVG chart builders (no DOM, no dependencies).

const WIDTH = 560;
const HEIGHT = 360;
const MARGIN = { top: 42, right: 24, bottom: 48, left: 56 };

export const PALETTE = [
  "#3b82f6", "#ef4444", "#10b981", "#f59e0b", "#8b5cf6", "#06b6d4",
  "#ec4899", "#84cc16",
];

const PLOT_W = WIDTH - MARGIN.left - MARGIN.right;
const PLOT_H = HEIGHT - MARGIN.top - MARGIN.bottom;

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function fmt(v: number): string {
  return Number.isInteger(v) ? String(v) : v.toFixed(3).replace(/0+$/, "").replace(/\.$/, "");
}

function frame(title: string, body: string): string {
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="sans-serif">`,
    `<rect width="${WIDTH}" height="${HEIGHT}" fill="#ffffff"/>`,
    `<text x="${WIDTH / 2}" y="24" text-anchor="middle" font-size="15" fill="#111">${esc(title)}</text>`,
    body,
    `</svg>`,
  ].join("\n");
}

function axes(xLabel: string, yLabel: string, xTicks: Array<[number, string]>,
              yTicks: Array<[number, string]>): string {
  const x0 = MARGIN.left;
  const y0 = MARGIN.top + PLOT_H;
  const parts = [
    `<line x1="${x0}" y1="${y0}" x2="${x0 + PLOT_W}" y2="${y0}" stroke="#333"/>`,
    `<line x1="${x0}" y1="${MARGIN.top}" x2="${x0}" y2="${y0}" stroke="#333"/>`,
    `<text x="${x0 + PLOT_W / 2}" y="${HEIGHT - 10}" text-anchor="middle" font-size="12" fill="#333">${esc(xLabel)}</text>`,
    `<text x="16" y="${MARGIN.top + PLOT_H / 2}" text-anchor="middle" font-size="12" fill="#333" transform="rotate(-90 16 ${MARGIN.top + PLOT_H / 2})">${esc(yLabel)}</text>`,
  ];
  for (const [fx, label] of xTicks) {
    const px = x0 + fx * PLOT_W;
    parts.push(`<line x1="${px}" y1="${y0}" x2="${px}" y2="${y0 + 4}" stroke="#333"/>`);
    parts.push(`<text x="${px}" y="${y0 + 18}" text-anchor="middle" font-size="11" fill="#333">${esc(label)}</text>`);
  }
  for (const [fy, label] of yTicks) {
    const py = y0 - fy * PLOT_H;
    parts.push(`<line x1="${x0 - 4}" y1="${py}" x2="${x0}" y2="${py}" stroke="#333"/>`);
    parts.push(`<text x="${x0 - 8}" y="${py + 4}" text-anchor="end" font-size="11" fill="#333">${esc(label)}</text>`);
  }
  return parts.join("\n");
}

function legend(entries: Array<{ label: string; color: string }>): string {
  const parts: string[] = [];
  entries.forEach((e, i) => {
    const y = MARGIN.top + 6 + i * 16;
    const x = MARGIN.left + PLOT_W - 120;
    parts.push(`<rect x="${x}" y="${y - 9}" width="10" height="10" fill="${e.color}"/>`);
    parts.push(`<text x="${x + 14}" y="${y}" font-size="11" fill="#333">${esc(e.label)}</text>`);
  });
  return parts.join("\n");
}

export function svgHistogram(counts: number[], title: string, yLabel = "count"): string {
  const bins = counts.length;
  const maxCount = Math.max(1, ...counts);
  const x0 = MARGIN.left;
  const y0 = MARGIN.top + PLOT_H;
  const bars = counts.map((c, i) => {
    const h = (c / maxCount) * PLOT_H;
    const bw = PLOT_W / bins;
    return `<rect x="${fmt(x0 + i * bw)}" y="${fmt(y0 - h)}" width="${fmt(bw - 1)}" height="${fmt(h)}" fill="${PALETTE[0]}"/>`;
  });
  const xTicks: Array<[number, string]> = [[0, "0"], [0.5, "0.5"], [1, "1"]];
  const yTicks: Array<[number, string]> = [[0, "0"], [1, fmt(maxCount)]];
  return frame(title, bars.join("\n") + "\n" + axes("p-value", yLabel, xTicks, yTicks));
}

export interface Series {
  label: string;
  color: string;
  points: Array<[number, number]>; // (x, y) pairs, x on a shared numeric axis
}

export function svgLineChart(series: Series[], title: string, xLabel: string,
                             yLabel: string, yMax?: number): string {
  const xs = series.flatMap((s) => s.points.map((p) => p[0]));
  const ys = series.flatMap((s) => s.points.map((p) => p[1]));
  const xMin = xs.length ? Math.min(...xs) : 0;
  const xMax = xs.length ? Math.max(...xs) : 1;
  const top = yMax ?? (ys.length ? Math.max(1e-12, ...ys) : 1);
  const spanX = xMax - xMin || 1;
  const px = (x: number) => MARGIN.left + ((x - xMin) / spanX) * PLOT_W;
  const py = (y: number) => MARGIN.top + PLOT_H - (Math.min(y, top) / top) * PLOT_H;
  const body: string[] = [];
  for (const s of series) {
    const pts = [...s.points].sort((a, b) => a[0] - b[0]);
    if (pts.length > 1) {
      const path = pts.map(([x, y]) => `${fmt(px(x))},${fmt(py(y))}`).join(" ");
      body.push(`<polyline points="${path}" fill="none" stroke="${s.color}" stroke-width="1.5"/>`);
    }
    for (const [x, y] of pts) {
      body.push(`<circle cx="${fmt(px(x))}" cy="${fmt(py(y))}" r="3" fill="${s.color}"/>`);
    }
  }
  const xTickVals = [...new Set(xs)].sort((a, b) => a - b);
  const xTicks: Array<[number, string]> = xTickVals.map((x) => [(x - xMin) / spanX, fmt(x)]);
  const yTicks: Array<[number, string]> = [[0, "0"], [0.5, fmt(top / 2)], [1, fmt(top)]];
  return frame(
    title,
    body.join("\n") + "\n" + axes(xLabel, yLabel, xTicks, yTicks)
    + "\n" + legend(series.map((s) => ({ label: s.label, color: s.color }))),
  );
}

export interface BarGroup {
  label: string;
  bars: Array<{ label: string; value: number; color: string }>;
}

export function svgBarGroups(groups: BarGroup[], title: string, yLabel: string): string {
  const values = groups.flatMap((g) => g.bars.map((b) => b.value));
  const top = Math.max(1e-12, ...values);
  const x0 = MARGIN.left;
  const y0 = MARGIN.top + PLOT_H;
  const groupW = PLOT_W / Math.max(1, groups.length);
  const body: string[] = [];
  const xTicks: Array<[number, string]> = [];
  groups.forEach((g, gi) => {
    const barW = (groupW * 0.8) / Math.max(1, g.bars.length);
    g.bars.forEach((b, bi) => {
      const h = (b.value / top) * PLOT_H;
      const x = x0 + gi * groupW + groupW * 0.1 + bi * barW;
      body.push(`<rect x="${fmt(x)}" y="${fmt(y0 - h)}" width="${fmt(barW - 1)}" height="${fmt(h)}" fill="${b.color}"/>`);
    });
    xTicks.push([(gi + 0.5) / groups.length, g.label]);
  });
  const seen = new Map<string, string>();
  for (const g of groups) for (const b of g.bars) seen.set(b.label, b.color);
  const yTicks: Array<[number, string]> = [[0, "0"], [1, fmt(top)]];
  return frame(
    title,
    body.join("\n") + "\n" + axes("matrix size", yLabel, xTicks, yTicks)
    + "\n" + legend([...seen].map(([label, color]) => ({ label, color }))),
  );
}
