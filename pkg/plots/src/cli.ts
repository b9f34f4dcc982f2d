import yargs from "yargs";
import { hideBin } from "yargs/helpers";
import { SchemaError } from "./schema";
import { PlotKind, renderSpec } from "./render";

export function main(argv: string[]): number {
  const args = yargs(argv)
    .scriptName("cfbandits-plot")
    .usage("$0 --input <csv...> --kind <kind> [--out <svg>] [--log-x]")
    .option("input", {
      type: "string",
      array: true,
      demandOption: true,
      describe: "harness CSV file(s); regret_vs_epsilon takes one per epsilon",
    })
    .option("kind", {
      choices: ["regret_vs_t", "regret_vs_epsilon"] as const,
      demandOption: true,
      describe: "figure type",
    })
    .option("out", {
      type: "string",
      describe: "output SVG path (default: derived from the input basename)",
    })
    .option("log-x", {
      type: "boolean",
      describe: "logarithmic x axis (default: on for regret_vs_epsilon)",
    })
    .strict()
    .exitProcess(false)
    .parseSync();

  try {
    const out = renderSpec({
      inputs: args.input,
      kind: args.kind as PlotKind,
      out: args.out,
      logX: args["log-x"],
    });
    console.log(`wrote ${out}`);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`error: ${err.message}`);
      return 1;
    }
    throw err;
  }
}

if (typeof require !== "undefined" && require.main === module) {
  process.exit(main(hideBin(process.argv)));
}
