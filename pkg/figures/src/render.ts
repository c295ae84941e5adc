import { mkdirSync, writeFileSync } from "fs";
import { dirname } from "path";

import { readCsv } from "./csv.js";
import { FigureRecipe, buildChart } from "./recipes.js";
import { renderChart } from "./svg.js";

/** Read the recipe's CSV, build the chart, write the SVG. Read-only over the
 * input; re-rendering produces identical bytes. */
export function render(recipe: FigureRecipe): string {
  const table = readCsv(recipe.input);
  const chart = buildChart(recipe.id, table, recipe.input);
  const svg = renderChart(chart);
  mkdirSync(dirname(recipe.output) || ".", { recursive: true });
  writeFileSync(recipe.output, svg, "utf8");
  return svg;
}

export function runFigure(id: FigureRecipe["id"], argv: string[] = process.argv.slice(2)): void {
  if (argv.length !== 2) {
    console.error(`usage: ${id} <input.csv> <output.svg>`);
    process.exit(2);
  }
  const [input, output] = argv;
  try {
    render({ id, input, output });
    console.log(`${id}: wrote ${output}`);
  } catch (err) {
    console.error(`${id}: ${(err as Error).message}`);
    process.exit(1);
  }
}
