import { existsSync } from "fs";
import { join } from "path";

import { EXPECTED_INPUT, FIGURE_IDS } from "../recipes.js";
import { render } from "../render.js";

// render every figure whose expected CSV is present under the input directory
const [inDir = ".", outDir = "figures-out"] = process.argv.slice(2);
let rendered = 0;
for (const id of FIGURE_IDS) {
  const input = join(inDir, EXPECTED_INPUT[id]);
  if (!existsSync(input)) {
    console.log(`${id}: skipped (${EXPECTED_INPUT[id]} not found)`);
    continue;
  }
  render({ id, input, output: join(outDir, `${id}.svg`) });
  console.log(`${id}: wrote ${join(outDir, `${id}.svg`)}`);
  rendered += 1;
}
if (rendered === 0) {
  console.error("no figures rendered");
  process.exit(1);
}
