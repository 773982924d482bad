/**
 * Oracle protocol loop: newline-delimited UTF-8 JSON, one object per
 * line, one response per request in order.
 *
 *   request:  {"type": "accuracy", "h": <int>, "m": [<int>, ...], "seed": <int>}
 *   response: {"type": "accuracy", "value": <float>}
 *          or {"type": "error", "message": <string>}
 *
 * Malformed or unsatisfiable lines produce an error record and the loop
 * continues; EOF ends the process cleanly.
 */

import * as readline from "node:readline";
import { Readable, Writable } from "node:stream";

import { trainAndScore } from "./classifier";
import { DEFAULT_OPTIONS, DatasetOptions, evalSet, synthesize } from "./dataset";

export interface AccuracyRequest {
  h: number;
  m: number[];
  seed: number;
}

type Reply =
  | { type: "accuracy"; value: number }
  | { type: "error"; message: string };

function isCount(value: unknown): value is number {
  return typeof value === "number" && Number.isInteger(value) && value >= 0;
}

/** Parse one request line; returns an error reply for anything invalid. */
export function parseRequest(line: string): AccuracyRequest | Reply {
  let parsed: unknown;
  try {
    parsed = JSON.parse(line);
  } catch {
    return { type: "error", message: `invalid JSON: ${line.slice(0, 80)}` };
  }
  if (typeof parsed !== "object" || parsed === null) {
    return { type: "error", message: "request must be a JSON object" };
  }
  const req = parsed as Record<string, unknown>;
  if (req.type !== "accuracy") {
    return { type: "error", message: `unknown request type: ${String(req.type)}` };
  }
  if (!isCount(req.h)) {
    return { type: "error", message: "h must be an integer >= 0" };
  }
  if (!Array.isArray(req.m) || !req.m.every(isCount)) {
    return { type: "error", message: "m must be an array of integers >= 0" };
  }
  if (typeof req.seed !== "number" || !Number.isInteger(req.seed)) {
    return { type: "error", message: "seed must be an integer" };
  }
  return { h: req.h, m: req.m as number[], seed: req.seed };
}

/** Answer one well-formed request: synthesize, train, score. */
export function answer(request: AccuracyRequest, options: DatasetOptions): Reply {
  const trainSet = synthesize(request.h, request.m, request.seed, options);
  const holdout = evalSet(request.seed, options);
  const value = trainAndScore(trainSet, holdout);
  return { type: "accuracy", value };
}

export function handleLine(line: string, options: DatasetOptions = DEFAULT_OPTIONS): Reply {
  const parsed = parseRequest(line);
  if ("type" in parsed) return parsed;
  return answer(parsed, options);
}

/** Serve requests from input to output until EOF. */
export function serve(
  input: Readable,
  output: Writable,
  options: DatasetOptions = DEFAULT_OPTIONS
): Promise<void> {
  const rl = readline.createInterface({ input, terminal: false });
  return new Promise((resolve) => {
    rl.on("line", (line) => {
      if (line.trim() === "") return;
      output.write(JSON.stringify(handleLine(line, options)) + "\n");
    });
    rl.on("close", resolve);
  });
}
