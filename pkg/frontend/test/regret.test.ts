import { readFileSync } from "node:fs";
import { join } from "node:path";

import { describe, expect, it } from "vitest";

import { MissingColumnError } from "../src/csv";
import { renderRegretFigure } from "../src/regret";

const LINEAR_REGRET = readFileSync(
  join(__dirname, "..", "data", "linear", "regret.csv"), "utf8");

describe("renderRegretFigure", () => {
  it("renders axis labels and a series per dimension", () => {
    const svg = renderRegretFigure(LINEAR_REGRET);
    expect(svg).toContain("cumulative arm pulls");
    expect(svg).toContain("mean simple regret");
    // the bundled linear sweep has d in {5, 10, 20}
    expect(svg).toContain(">linear d=5</text>");
    expect(svg).toContain(">linear d=10</text>");
    expect(svg).toContain(">linear d=20</text>");
  });

  it("renders a flat line for constant-zero regret", () => {
    const csv = [
      "algorithm,d,pulls,mean_regret",
      "alpha,5,10,0",
      "alpha,5,20,0",
      "alpha,5,30,0",
      "",
    ].join("\n");
    const svg = renderRegretFigure(csv);
    const path = svg.match(/<path d="([^"]+)"/)![1];
    const ys = [...path.matchAll(/[ML][\d.]+ ([\d.]+)/g)].map((m) => m[1]);
    expect(ys.length).toBe(3);
    expect(new Set(ys).size).toBe(1);
  });

  it("renders two algorithms as two series", () => {
    const csv = [
      "algorithm,d,pulls,mean_regret",
      "alpha,5,10,0.9",
      "alpha,5,20,0.4",
      "beta,5,10,0.8",
      "beta,5,25,0.2",
      "",
    ].join("\n");
    const svg = renderRegretFigure(csv);
    expect((svg.match(/<path /g) ?? []).length).toBe(2);
    expect(svg).toContain(">alpha</text>");
    expect(svg).toContain(">beta</text>");
  });

  it("is deterministic", () => {
    expect(renderRegretFigure(LINEAR_REGRET))
      .toBe(renderRegretFigure(LINEAR_REGRET));
  });

  it("rejects non-monotone pulls within a series", () => {
    const csv = [
      "algorithm,d,pulls,mean_regret",
      "alpha,5,20,0.9",
      "alpha,5,10,0.4",
      "",
    ].join("\n");
    expect(() => renderRegretFigure(csv)).toThrow(/not increasing/);
  });

  it("rejects missing columns", () => {
    expect(() => renderRegretFigure("algorithm,pulls\nx,1\n"))
      .toThrow(MissingColumnError);
  });
});
