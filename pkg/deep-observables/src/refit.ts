/**
 * Training runs and the refit comparison against the core toolkit.
 *
 * `trainRun` fits the joint model on the train split of a trajectory
 * dataset and exports the hidden stack (weights.json), the jointly
 * trained matrix (a_nn.json), and the split metadata.  `refitRun` hands
 * those artifacts to the core CLI (`fit --method dde --dict mlp:...`),
 * which recomputes the transition matrix by volume-weighted encoding,
 * then scores both matrices on the held-out trajectories.
 */

import * as fs from "node:fs";
import * as path from "node:path";
import { spawnSync } from "node:child_process";

import {
  Dataset,
  loadDataset,
  pairsFromTrajectories,
  savePairsCsv,
  segmentTrajectories,
  splitTrajectories,
} from "./data.js";
import { DEFAULT_CONFIG, TrainConfig, train } from "./koopman.js";
import { loadWeights, saveMatrix, saveWeights, loadMatrix } from "./weights.js";
import { rolloutSse } from "./rollout.js";

export const PYTHON = process.env.KDDE_PYTHON ?? "python3";

export interface RunArtifacts {
  dir: string;
  weightsPath: string;
  aNnPath: string;
  trainCsvPath: string;
  splitPath: string;
  lossHistoryPath: string;
}

function artifactPaths(dir: string): RunArtifacts {
  return {
    dir,
    weightsPath: path.join(dir, "weights.json"),
    aNnPath: path.join(dir, "a_nn.json"),
    trainCsvPath: path.join(dir, "train.csv"),
    splitPath: path.join(dir, "split.json"),
    lossHistoryPath: path.join(dir, "loss_history.csv"),
  };
}

export async function trainRun(
  dataPath: string,
  outDir: string,
  config: Partial<TrainConfig> = {},
  testFraction = 0.2,
): Promise<RunArtifacts> {
  const cfg: TrainConfig = { ...DEFAULT_CONFIG, ...config };
  const data = loadDataset(dataPath);
  const trajectories = segmentTrajectories(data);
  const split = splitTrajectories(trajectories.length, testFraction, cfg.seed);
  const pairs = pairsFromTrajectories(trajectories, split.train);

  const result = await train(pairs.x, pairs.y, cfg);

  fs.mkdirSync(outDir, { recursive: true });
  const art = artifactPaths(outDir);
  saveWeights(art.weightsPath, result.net.stack, cfg.includeState);
  saveMatrix(art.aNnPath, result.net.A.value, result.net.m);
  savePairsCsv(art.trainCsvPath, pairs.x, pairs.y, data.n);
  fs.writeFileSync(
    art.splitPath,
    JSON.stringify(
      { data: path.resolve(dataPath), test: split.test, train: split.train,
        seed: cfg.seed, test_fraction: testFraction },
      null,
      2,
    ),
  );
  fs.writeFileSync(
    art.lossHistoryPath,
    "epoch,loss\n" +
      result.lossHistory.map((l, i) => `${i},${l}`).join("\n") +
      "\n",
  );
  return art;
}

export interface ComparisonReport {
  oneStep: { nn: number; dde: number };
  twentyStep: { nn: number; dde: number };
  horizons: number[];
  improvementTwentyStep: number;
  ddeModelPath: string;
}

export function refitRun(
  runDir: string,
  ridge = 1e-8,
  horizons: number[] = [1, 20],
): ComparisonReport {
  const art = artifactPaths(runDir);
  const split = JSON.parse(fs.readFileSync(art.splitPath, "utf8")) as {
    data: string;
    test: number[];
  };
  const data: Dataset = loadDataset(split.data);
  const trajectories = segmentTrajectories(data);
  const testTrajectories = split.test.map((i) => trajectories[i]);

  const ddeModelPath = path.join(runDir, "dde_model.json");
  const fit = spawnSync(
    PYTHON,
    [
      "-m", "kdde", "fit",
      "--method", "dde",
      "--dict", `mlp:${art.weightsPath}`,
      "--data", art.trainCsvPath,
      "--ridge", String(ridge),
      "--out", ddeModelPath,
    ],
    { encoding: "utf8" },
  );
  if (fit.status !== 0) {
    throw new Error(`core fit failed (exit ${fit.status}): ${fit.stderr}`);
  }

  const { stack, includeState } = loadWeights(art.weightsPath);
  const { a: aNn, m } = loadMatrix(art.aNnPath);
  const ddeDoc = JSON.parse(fs.readFileSync(ddeModelPath, "utf8")) as {
    A: number[][];
  };
  const aDde = new Float64Array(m * m);
  for (let i = 0; i < m; i++) {
    for (let j = 0; j < m; j++) aDde[i * m + j] = ddeDoc.A[i][j];
  }

  const sse = (a: Float64Array, horizon: number) =>
    rolloutSse(a, m, stack, includeState, testTrajectories, horizon);
  const report: ComparisonReport = {
    oneStep: { nn: sse(aNn, 1), dde: sse(aDde, 1) },
    twentyStep: { nn: sse(aNn, 20), dde: sse(aDde, 20) },
    horizons,
    improvementTwentyStep: 0,
    ddeModelPath,
  };
  report.improvementTwentyStep =
    (report.twentyStep.nn - report.twentyStep.dde) / report.twentyStep.nn;

  fs.writeFileSync(
    path.join(runDir, "report.json"),
    JSON.stringify(report, null, 2) + "\n",
  );
  fs.writeFileSync(path.join(runDir, "report.md"), reportMarkdown(report));
  return report;
}

export function reportMarkdown(report: ComparisonReport): string {
  const pct = (v: number) => `${(100 * v).toFixed(1)}%`;
  return [
    "| Modeling Method | 1 Time Step | 20 Time Steps |",
    "|---|---|---|",
    `| Jointly trained linear layer | ${report.oneStep.nn.toFixed(4)} | ${report.twentyStep.nn.toFixed(4)} |`,
    `| Mesh-weighted refit | ${report.oneStep.dde.toFixed(4)} | ${report.twentyStep.dde.toFixed(4)} |`,
    "",
    `20-step SSE change after refit: ${pct(report.improvementTwentyStep)}`,
    "",
  ].join("\n");
}
