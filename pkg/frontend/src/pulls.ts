/** Total pulls vs. dimension, one series per algorithm, error bars of one
 * standard deviation (drawn straight from the summary CSV, never
 * recomputed). */

import { numberAt, parseCsv, requireColumns, Table } from "./csv";
import { axes, circle, document, legend, line, PALETTE, polyline } from "./svg";

interface PullPoint {
  d: number;
  mean: number;
  std: number;
}

export function pullSeries(table: Table): Map<string, PullPoint[]> {
  const [dIdx, algIdx, meanIdx, stdIdx] = requireColumns(
    table, ["d", "algorithm", "mean_pulls", "std_pulls"]);
  const series = new Map<string, PullPoint[]>();
  for (const row of table.rows) {
    const alg = row[algIdx];
    if (!series.has(alg)) {
      series.set(alg, []);
    }
    series.get(alg)!.push({
      d: numberAt(row, dIdx),
      mean: numberAt(row, meanIdx),
      std: numberAt(row, stdIdx),
    });
  }
  for (const points of series.values()) {
    points.sort((a, b) => a.d - b.d);
  }
  return series;
}

export function renderPullsFigure(csvText: string): string {
  const table = parseCsv(csvText);
  const series = pullSeries(table);
  const allPoints = [...series.values()].flat();
  const dValues = [...new Set(allPoints.map((p) => p.d))].sort((a, b) => a - b);
  if (dValues.length < 2) {
    throw new Error("need at least two dimension values to plot a trend");
  }
  const dSpan = dValues[dValues.length - 1] - dValues[0];
  const xDomain: [number, number] = [dValues[0] - 0.05 * dSpan,
                                     dValues[dValues.length - 1] + 0.05 * dSpan];
  const highs = allPoints.map((p) => p.mean + p.std);
  const lows = allPoints.map((p) => Math.max(0, p.mean - p.std));
  const yMax = Math.max(...highs) * 1.05;
  const yDomain: [number, number] = [Math.min(0, ...lows), yMax];

  const ax = axes(xDomain, yDomain, "dimension d", "total arm pulls", dValues);
  const body = [...ax.parts];
  const names = [...series.keys()].sort();
  names.forEach((name, si) => {
    const color = PALETTE[si % PALETTE.length];
    const points = series.get(name)!;
    body.push(polyline(points.map((p) => [ax.x(p.d), ax.y(p.mean)]), color));
    for (const p of points) {
      const px = ax.x(p.d);
      const yLow = ax.y(p.mean - p.std);
      const yHigh = ax.y(p.mean + p.std);
      body.push(line(px, yLow, px, yHigh, color, 1.5));
      body.push(line(px - 5, yLow, px + 5, yLow, color, 1.5));
      body.push(line(px - 5, yHigh, px + 5, yHigh, color, 1.5));
      body.push(circle(px, ax.y(p.mean), 3, color));
    }
  });
  body.push(...legend(names, names.map((_, i) => PALETTE[i % PALETTE.length])));
  return document("Total arm pulls to termination vs. dimension", body);
}
