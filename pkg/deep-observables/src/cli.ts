#!/usr/bin/env node
/**
 * deep-observables CLI: train an observable dictionary on a trajectory
 * dataset, then refit its final linear layer through the core toolkit.
 *
 *   deep-observables train --data traj.csv --out-dir run1 [--epochs 500]
 *       [--batch 256] [--lr 0.01] [--hidden 16,16,40] [--seed 0]
 *       [--test-fraction 0.2]
 *   deep-observables refit --run run1 [--ridge 1e-8]
 */

import { parseArgs } from "node:util";

import { refitRun, reportMarkdown, trainRun } from "./refit.js";

function fail(message: string): never {
  console.error(`error: ${message}`);
  process.exit(2);
}

async function main(): Promise<void> {
  const [command, ...rest] = process.argv.slice(2);
  if (command === "train") {
    const { values } = parseArgs({
      args: rest,
      options: {
        data: { type: "string" },
        "out-dir": { type: "string" },
        epochs: { type: "string", default: "500" },
        batch: { type: "string", default: "256" },
        lr: { type: "string", default: "0.01" },
        hidden: { type: "string", default: "16,16,40" },
        seed: { type: "string", default: "0" },
        "test-fraction": { type: "string", default: "0.2" },
      },
    });
    if (!values.data || !values["out-dir"]) fail("train needs --data and --out-dir");
    const art = await trainRun(
      values.data,
      values["out-dir"],
      {
        epochs: Number(values.epochs),
        batchSize: Number(values.batch),
        lr: Number(values.lr),
        hidden: values.hidden!.split(",").map(Number),
        seed: Number(values.seed),
      },
      Number(values["test-fraction"]),
    );
    console.log(`wrote ${art.weightsPath}, ${art.aNnPath}, ${art.trainCsvPath}`);
  } else if (command === "refit") {
    const { values } = parseArgs({
      args: rest,
      options: {
        run: { type: "string" },
        ridge: { type: "string", default: "1e-8" },
      },
    });
    if (!values.run) fail("refit needs --run");
    const report = refitRun(values.run, Number(values.ridge));
    console.log(reportMarkdown(report));
  } else {
    fail(`unknown command ${command ?? "(none)"} (use train or refit)`);
  }
}

await main();
