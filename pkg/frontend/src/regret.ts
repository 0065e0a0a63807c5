/** Mean simple regret vs. cumulative pulls, one series per (algorithm,
 * dimension) pair found in the regret CSV. */

import { numberAt, parseCsv, requireColumns, Table } from "./csv";
import { axes, document, legend, PALETTE, polyline } from "./svg";

interface RegretPoint {
  pulls: number;
  regret: number;
}

export function regretSeries(table: Table): Map<string, RegretPoint[]> {
  const [algIdx, dIdx, pullsIdx, regretIdx] = requireColumns(
    table, ["algorithm", "d", "pulls", "mean_regret"]);
  const series = new Map<string, RegretPoint[]>();
  const dPerAlg = new Map<string, Set<string>>();
  for (const row of table.rows) {
    if (!dPerAlg.has(row[algIdx])) {
      dPerAlg.set(row[algIdx], new Set());
    }
    dPerAlg.get(row[algIdx])!.add(row[dIdx]);
  }
  for (const row of table.rows) {
    const multi = dPerAlg.get(row[algIdx])!.size > 1;
    const key = multi ? `${row[algIdx]} d=${row[dIdx]}` : row[algIdx];
    if (!series.has(key)) {
      series.set(key, []);
    }
    series.get(key)!.push({
      pulls: numberAt(row, pullsIdx),
      regret: numberAt(row, regretIdx),
    });
  }
  for (const [key, points] of series) {
    for (let i = 1; i < points.length; i++) {
      if (points[i].pulls <= points[i - 1].pulls) {
        throw new Error(`pulls column is not increasing within series ${key}`);
      }
    }
  }
  return series;
}

export function renderRegretFigure(csvText: string): string {
  const table = parseCsv(csvText);
  const series = regretSeries(table);
  const allPoints = [...series.values()].flat();
  if (allPoints.length === 0) {
    throw new Error("regret CSV has no data rows");
  }
  const xMax = Math.max(...allPoints.map((p) => p.pulls));
  const yMax = Math.max(...allPoints.map((p) => p.regret), 1e-9);
  const ax = axes([0, xMax * 1.02], [0, yMax * 1.05],
                  "cumulative arm pulls", "mean simple regret");
  const body = [...ax.parts];
  const names = [...series.keys()].sort();
  names.forEach((name, si) => {
    const color = PALETTE[si % PALETTE.length];
    const points = series.get(name)!;
    body.push(polyline(points.map((p) => [ax.x(p.pulls), ax.y(p.regret)]),
                       color, 1.5));
  });
  body.push(...legend(names, names.map((_, i) => PALETTE[i % PALETTE.length])));
  return document("Simple regret vs. arm pulls", body);
}
