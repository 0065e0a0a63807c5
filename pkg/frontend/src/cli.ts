#!/usr/bin/env node
/** figures <pulls|regret> --in <csv> --out <svg>
 *
 * Reads a harness CSV and writes a deterministic SVG figure. Inputs are
 * never modified and no statistics are recomputed here. Exit status 0 only
 * when the output file was written.
 */

import { readFileSync, writeFileSync } from "node:fs";

import { renderPullsFigure } from "./pulls";
import { renderRegretFigure } from "./regret";

const USAGE =
  "usage: figures <pulls|regret> --in <input.csv> --out <output.svg>";

export function parseArgs(argv: string[]): { kind: string; input: string; output: string } {
  const [kind, ...rest] = argv;
  if (kind !== "pulls" && kind !== "regret") {
    throw new Error(USAGE);
  }
  let input: string | undefined;
  let output: string | undefined;
  for (let i = 0; i < rest.length; i += 2) {
    const flag = rest[i];
    const value = rest[i + 1];
    if (value === undefined) {
      throw new Error(USAGE);
    }
    if (flag === "--in") {
      input = value;
    } else if (flag === "--out") {
      output = value;
    } else {
      throw new Error(`unknown flag ${flag}\n${USAGE}`);
    }
  }
  if (!input || !output) {
    throw new Error(USAGE);
  }
  return { kind, input, output };
}

export function runCli(argv: string[]): number {
  let args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    process.stderr.write(`${(err as Error).message}\n`);
    return 2;
  }
  try {
    const csvText = readFileSync(args.input, "utf8");
    const svg = args.kind === "pulls"
      ? renderPullsFigure(csvText)
      : renderRegretFigure(csvText);
    writeFileSync(args.output, svg, "utf8");
    return 0;
  } catch (err) {
    process.stderr.write(`error: ${(err as Error).message}\n`);
    return 1;
  }
}

if (require.main === module) {
  process.exit(runCli(process.argv.slice(2)));
}
