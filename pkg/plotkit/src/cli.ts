#!/usr/bin/env node
/**
 * plotkit <figure-id> --in <csv...> --out <figure.svg>
 *
 * Renders the fso-cvmdi CSV outputs into deterministic SVG figures.
 * Exit codes: 0 success, 1 data error (missing columns, mixed hashes,
 * empty or malformed CSV), 2 usage error. No file is written on failure.
 */
import { writeFileSync } from "node:fs";
import { CsvError, readCsv } from "./csv.js";
import { FIGURES, buildFigure } from "./figures.js";
import { renderSvg } from "./svg.js";

interface Args {
  figureId: string;
  inputs: string[];
  out: string;
}

export function parseArgs(argv: string[]): Args {
  const [figureId, ...rest] = argv;
  if (!figureId || figureId.startsWith("--")) {
    throw new UsageError(
      `usage: plotkit <figure-id> --in <csv...> --out <file.svg>\n` +
        `figures: ${Object.keys(FIGURES).join(", ")}`,
    );
  }
  const inputs: string[] = [];
  let out = "";
  let mode: "in" | "out" | null = null;
  for (const arg of rest) {
    if (arg === "--in") {
      mode = "in";
    } else if (arg === "--out") {
      mode = "out";
    } else if (arg.startsWith("--")) {
      throw new UsageError(`unknown option ${arg}`);
    } else if (mode === "in") {
      inputs.push(arg);
    } else if (mode === "out") {
      out = arg;
      mode = null;
    } else {
      throw new UsageError(`unexpected argument ${arg}`);
    }
  }
  if (inputs.length === 0) throw new UsageError("no --in files given");
  if (!out) throw new UsageError("no --out file given");
  if (!out.endsWith(".svg")) {
    throw new UsageError(`output must be an .svg path, got ${out}`);
  }
  return { figureId, inputs, out };
}

export class UsageError extends Error {}

export function run(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (error) {
    if (error instanceof UsageError) {
      process.stderr.write(`${error.message}\n`);
      return 2;
    }
    throw error;
  }
  try {
    const tables = args.inputs.map(readCsv);
    const panels = buildFigure(args.figureId, tables);
    const footer = `${args.figureId} | config ${tables
      .map((t) => t.hash)
      .join(", ")}`;
    const svg = renderSvg(panels, footer);
    writeFileSync(args.out, svg, "utf8");
    return 0;
  } catch (error) {
    if (error instanceof CsvError) {
      process.stderr.write(`plotkit: ${error.message}\n`);
      return 1;
    }
    throw error;
  }
}

import { pathToFileURL } from "node:url";

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url === pathToFileURL(process.argv[1]).href;
if (invokedDirectly) {
  process.exit(run(process.argv.slice(2)));
}
