import { readFileSync } from "node:fs";
import { join } from "node:path";

import { describe, expect, it } from "vitest";

import { MissingColumnError } from "../src/csv";
import { renderPullsFigure } from "../src/pulls";

const LINEAR_SUMMARY = readFileSync(
  join(__dirname, "..", "data", "linear", "summary.csv"), "utf8");

const TWO_ALG_CSV = [
  "d,algorithm,n_trials,mean_pulls,std_pulls,correct_rate,unsafe_trials",
  "5,alpha,10,100,10,1,0",
  "10,alpha,10,200,20,1,0",
  "5,beta,10,150,0,1,0",
  "10,beta,10,300,0,1,0",
  "",
].join("\n");

describe("renderPullsFigure", () => {
  it("renders one point per summary row", () => {
    const svg = renderPullsFigure(LINEAR_SUMMARY);
    expect((svg.match(/<circle /g) ?? []).length).toBe(3);
    expect(svg).toContain("dimension d");
    expect(svg).toContain("total arm pulls");
  });

  it("renders a legend even for a single series", () => {
    const svg = renderPullsFigure(LINEAR_SUMMARY);
    expect(svg).toContain(">linear</text>");
  });

  it("renders one series per algorithm", () => {
    const svg = renderPullsFigure(TWO_ALG_CSV);
    expect(svg).toContain(">alpha</text>");
    expect(svg).toContain(">beta</text>");
    expect((svg.match(/<path /g) ?? []).length).toBe(2);
  });

  it("gives zero-std rows error bars of zero height", () => {
    const svg = renderPullsFigure(TWO_ALG_CSV);
    const bars = [...svg.matchAll(
      /<line x1="([\d.]+)" y1="([\d.-]+)" x2="\1" y2="([\d.-]+)" stroke="#d62728"/g)];
    expect(bars.length).toBe(2); // the beta series vertical bars
    for (const bar of bars) {
      expect(bar[2]).toBe(bar[3]);
    }
  });

  it("is deterministic", () => {
    expect(renderPullsFigure(LINEAR_SUMMARY))
      .toBe(renderPullsFigure(LINEAR_SUMMARY));
  });

  it("rejects missing columns", () => {
    expect(() => renderPullsFigure("d,algorithm\n5,linear\n"))
      .toThrow(MissingColumnError);
  });

  it("rejects a single dimension value", () => {
    const csv = "d,algorithm,n_trials,mean_pulls,std_pulls,correct_rate,unsafe_trials\n"
      + "5,linear,10,100,10,1,0\n";
    expect(() => renderPullsFigure(csv)).toThrow(/two dimension values/);
  });
});
