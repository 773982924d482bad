#!/usr/bin/env node
/**
 * payoff-service [--sep FLOAT] [--eval-size INT]
 *
 * Serves the accuracy oracle protocol on stdin/stdout. See service.ts
 * for the wire format.
 */

import { DEFAULT_OPTIONS, DatasetOptions } from "./dataset";
import { serve } from "./service";

function parseArgs(argv: string[]): DatasetOptions {
  const options = { ...DEFAULT_OPTIONS };
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    if (arg === "--sep") {
      const value = Number(argv[++i]);
      if (!Number.isFinite(value) || value <= 0) {
        console.error(`payoff-service: --sep needs a number > 0`);
        process.exit(2);
      }
      options.sep = value;
    } else if (arg === "--eval-size") {
      const value = Number(argv[++i]);
      if (!Number.isInteger(value) || value < 1) {
        console.error(`payoff-service: --eval-size needs an integer >= 1`);
        process.exit(2);
      }
      options.evalSize = value;
    } else if (arg === "--help" || arg === "-h") {
      console.log("usage: payoff-service [--sep FLOAT] [--eval-size INT]");
      process.exit(0);
    } else {
      console.error(`payoff-service: unknown argument ${arg}`);
      process.exit(2);
    }
  }
  return options;
}

async function main(): Promise<void> {
  const options = parseArgs(process.argv.slice(2));
  await serve(process.stdin, process.stdout, options);
}

main().then(
  () => process.exit(0),
  (err) => {
    console.error(`payoff-service: ${err}`);
    process.exit(1);
  }
);
