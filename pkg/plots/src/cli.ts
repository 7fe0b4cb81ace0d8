#!/usr/bin/env node
/**
 * Render figures from a solver run directory.
 *
 *   rendopt-plots --run <dir> --out <dir> [--figures a,b,c]
 *
 * One SVG per selected figure.  A figure whose required data is absent
 * (empty iterate log, missing sweep table) is skipped with a warning;
 * schema mismatches and missing core artifacts are hard errors.
 */

import * as fs from "node:fs";
import * as path from "node:path";

import { ArtifactError, readRun } from "./artifacts.js";
import { buildFigure, FIGURE_NAMES, FigureName, FigureSkipped } from "./figures.js";
import { renderSvg } from "./render.js";

interface Args {
  run: string;
  out: string;
  figures: FigureName[];
}

function parseArgs(argv: string[]): Args {
  let run: string | undefined;
  let out: string | undefined;
  let figures: FigureName[] = [...FIGURE_NAMES];
  for (let i = 0; i < argv.length; i += 1) {
    const arg = argv[i];
    if (arg === "--run") {
      run = argv[++i];
    } else if (arg === "--out") {
      out = argv[++i];
    } else if (arg === "--figures") {
      const names = (argv[++i] ?? "").split(",").map((s) => s.trim());
      for (const name of names) {
        if (!FIGURE_NAMES.includes(name as FigureName)) {
          throw new Error(`unknown figure '${name}'`);
        }
      }
      figures = names as FigureName[];
    } else {
      throw new Error(`unknown argument '${arg}'`);
    }
  }
  if (!run || !out) {
    throw new Error("usage: rendopt-plots --run <dir> --out <dir> [--figures ...]");
  }
  return { run, out, figures };
}

export function renderRun(args: Args): string[] {
  const run = readRun(args.run);
  fs.mkdirSync(args.out, { recursive: true });
  const written: string[] = [];
  for (const name of args.figures) {
    let svg: string;
    try {
      svg = renderSvg(buildFigure(name, run));
    } catch (err) {
      if (err instanceof FigureSkipped) {
        console.warn(`warning: ${err.message}`);
        continue;
      }
      throw err;
    }
    const file = path.join(args.out, `${name}.svg`);
    fs.writeFileSync(file, svg);
    written.push(file);
  }
  return written;
}

export function main(argv: string[]): number {
  try {
    const args = parseArgs(argv);
    const written = renderRun(args);
    for (const file of written) {
      console.log(`wrote ${file}`);
    }
    return 0;
  } catch (err) {
    if (err instanceof ArtifactError) {
      console.error(`artifact error: ${(err as Error).message}`);
      return 2;
    }
    console.error(String(err instanceof Error ? err.message : err));
    return 1;
  }
}

const entry = process.argv[1];
if (entry && (entry.endsWith("cli.js") || entry.endsWith("rendopt-plots"))) {
  process.exit(main(process.argv.slice(2)));
}
