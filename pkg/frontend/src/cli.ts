#!/usr/bin/env node
/**
 * plot --spec layout.json [--out figure.svg]
 * plot --preset fig3 --data <dir> [--out figure.svg]
 *
 * Renders noise-spectrum figures from scan CSV output as SVG.
 */

import fs from "node:fs";
import { pathToFileURL } from "node:url";
import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { parsePlotSpec } from "./plotspec.js";
import { PRESET_NAMES, presetSpec } from "./presets.js";
import { renderToFile } from "./render.js";

export async function main(argv: string[]): Promise<number> {
  const args = await yargs(argv)
    .option("spec", { type: "string", describe: "plot spec JSON file" })
    .option("preset", {
      type: "string",
      choices: PRESET_NAMES,
      describe: "bundled figure layout",
    })
    .option("data", { type: "string", describe: "directory with preset CSV files" })
    .option("out", { type: "string", describe: "output SVG path" })
    .conflicts("spec", "preset")
    .strict()
    .help()
    .parse();

  try {
    if (args.spec) {
      const raw = JSON.parse(fs.readFileSync(args.spec, "utf8"));
      const spec = parsePlotSpec(raw);
      const out = args.out ?? spec.output ?? args.spec.replace(/\.json$/, "") + ".svg";
      console.log(`wrote ${renderToFile(spec, out)}`);
      return 0;
    }
    if (args.preset) {
      if (!args.data) {
        console.error("plot: --preset requires --data <dir>");
        return 1;
      }
      const spec = presetSpec(args.preset, args.data);
      const out = args.out ?? `${args.preset}.svg`;
      console.log(`wrote ${renderToFile(spec, out)}`);
      return 0;
    }
    console.error("plot: one of --spec or --preset is required");
    return 1;
  } catch (err) {
    console.error(`plot: ${err instanceof Error ? err.message : String(err)}`);
    return 1;
  }
}

function isDirectRun(): boolean {
  if (!process.argv[1]) return false;
  try {
    const invoked = pathToFileURL(fs.realpathSync(process.argv[1])).href;
    return import.meta.url === invoked;
  } catch {
    return false;
  }
}

if (isDirectRun()) {
  main(hideBin(process.argv)).then((code) => {
    process.exitCode = code;
  });
}
