/** Deterministic SVG assembly: fixed canvas, fixed style sheet, no locale or
 * environment dependence anywhere in the output. */

export const WIDTH = 800;
export const HEIGHT = 500;
export const MARGIN = { top: 40, right: 30, bottom: 60, left: 80 };

export const PALETTE = [
  "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

export const FONT = "font-family=\"Helvetica, Arial, sans-serif\"";

/** Coordinates rounded to 1/100 px keep files small and byte-stable. */
export function fmt(v: number): string {
  const r = Math.round(v * 100) / 100;
  return Object.is(r, -0) ? "0" : String(r);
}

export interface Scale {
  (v: number): number;
  domain: [number, number];
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  const scale = ((v: number) => r0 + ((v - d0) / span) * (r1 - r0)) as Scale;
  scale.domain = domain;
  return scale;
}

/** Round tick steps to a 1-2-5 progression. */
export function niceTicks(min: number, max: number, count = 6): number[] {
  if (min === max) {
    return [min];
  }
  const rawStep = (max - min) / Math.max(1, count - 1);
  const power = Math.floor(Math.log10(rawStep));
  const base = Math.pow(10, power);
  let step = base;
  for (const mult of [1, 2, 5, 10]) {
    step = mult * base;
    if (step >= rawStep) {
      break;
    }
  }
  const start = Math.ceil(min / step) * step;
  const ticks: number[] = [];
  for (let v = start; v <= max + step * 1e-9; v += step) {
    ticks.push(Math.round(v / step) * step);
  }
  return ticks;
}

export function tickLabel(v: number): string {
  if (Math.abs(v) >= 10000) {
    return v.toExponential(1).replace("e+", "e");
  }
  return fmt(v);
}

export function polyline(points: Array<[number, number]>, color: string,
                         width = 2): string {
  const d = points
    .map(([x, y], i) => `${i === 0 ? "M" : "L"}${fmt(x)} ${fmt(y)}`)
    .join("");
  return `<path d="${d}" fill="none" stroke="${color}" stroke-width="${width}"/>`;
}

export function line(x1: number, y1: number, x2: number, y2: number,
                     color: string, width = 1): string {
  return `<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" y2="${fmt(y2)}" `
    + `stroke="${color}" stroke-width="${width}"/>`;
}

export function circle(cx: number, cy: number, r: number, color: string): string {
  return `<circle cx="${fmt(cx)}" cy="${fmt(cy)}" r="${r}" fill="${color}"/>`;
}

export function text(x: number, y: number, content: string, anchor = "middle",
                     size = 13, extra = ""): string {
  return `<text x="${fmt(x)}" y="${fmt(y)}" text-anchor="${anchor}" `
    + `font-size="${size}" ${FONT}${extra}>${escapeXml(content)}</text>`;
}

export function escapeXml(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export interface Axes {
  x: Scale;
  y: Scale;
  parts: string[];
}

/** Frame, ticks, grid lines, and axis labels for the plot area. */
export function axes(xDomain: [number, number], yDomain: [number, number],
                     xLabel: string, yLabel: string,
                     xTickValues?: number[]): Axes {
  const x = linearScale(xDomain, [MARGIN.left, WIDTH - MARGIN.right]);
  const y = linearScale(yDomain, [HEIGHT - MARGIN.bottom, MARGIN.top]);
  const parts: string[] = [];
  const bottom = HEIGHT - MARGIN.bottom;
  parts.push(line(MARGIN.left, bottom, WIDTH - MARGIN.right, bottom, "#000"));
  parts.push(line(MARGIN.left, MARGIN.top, MARGIN.left, bottom, "#000"));
  const xTicks = xTickValues ?? niceTicks(xDomain[0], xDomain[1]);
  for (const v of xTicks) {
    const px = x(v);
    parts.push(line(px, bottom, px, bottom + 6, "#000"));
    parts.push(text(px, bottom + 22, tickLabel(v)));
  }
  for (const v of niceTicks(yDomain[0], yDomain[1])) {
    const py = y(v);
    parts.push(line(MARGIN.left - 6, py, MARGIN.left, py, "#000"));
    parts.push(line(MARGIN.left, py, WIDTH - MARGIN.right, py, "#e0e0e0"));
    parts.push(text(MARGIN.left - 10, py + 4, tickLabel(v), "end", 12));
  }
  parts.push(text((MARGIN.left + WIDTH - MARGIN.right) / 2, HEIGHT - 15, xLabel,
                  "middle", 15));
  parts.push(
    `<text x="20" y="${fmt((MARGIN.top + bottom) / 2)}" text-anchor="middle" `
    + `font-size="15" ${FONT} transform="rotate(-90 20 ${fmt((MARGIN.top + bottom) / 2)})">`
    + `${escapeXml(yLabel)}</text>`);
  return { x, y, parts };
}

export function legend(labels: string[], colors: string[]): string[] {
  const parts: string[] = [];
  labels.forEach((label, i) => {
    const yPos = MARGIN.top + 8 + 20 * i;
    const xPos = MARGIN.left + 14;
    parts.push(line(xPos, yPos, xPos + 24, yPos, colors[i], 3));
    parts.push(text(xPos + 30, yPos + 4, label, "start", 12));
  });
  return parts;
}

export function document(title: string, body: string[]): string {
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" `
    + `viewBox="0 0 ${WIDTH} ${HEIGHT}">`,
    `<rect width="${WIDTH}" height="${HEIGHT}" fill="#ffffff"/>`,
    text(WIDTH / 2, 24, title, "middle", 17),
    ...body,
    "</svg>",
    "",
  ].join("\n");
}
