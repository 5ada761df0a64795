/**
 * End-to-end refit acceptance: train the joint model on pendulum
 * trajectories, hand the learned observables to the core toolkit for a
 * mesh-weighted recomputation of the final layer, and compare rollout
 * accuracy on held-out trajectories over 5 seeds.
 *
 * The trajectory datasets use the 0.1 s map step (20 rollout steps = 2 s
 * of motion); the jointly trained matrix is consistently slightly
 * unstable, which the refit corrects.
 */

import { spawnSync } from "node:child_process";
import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";

import { afterAll, describe, expect, it } from "vitest";

import { refitRun, trainRun, PYTHON, ComparisonReport } from "../src/refit.js";
import { train, DEFAULT_CONFIG } from "../src/koopman.js";
import { loadDataset, pairsFromTrajectories, segmentTrajectories, splitTrajectories } from "../src/data.js";

const tmp = fs.mkdtempSync(path.join(os.tmpdir(), "deepobs-refit-"));
afterAll(() => fs.rmSync(tmp, { recursive: true, force: true }));

function genTrajectories(out: string, seed: number): void {
  const res = spawnSync(
    PYTHON,
    ["-m", "kdde", "gen-data", "--kind", "traj", "--n", "3000",
     "--seed", String(seed), "--dt", "0.1", "--substeps", "10", "--out", out],
    { encoding: "utf8" },
  );
  expect(res.status, res.stderr).toBe(0);
}

function median(values: number[]): number {
  const sorted = [...values].sort((a, b) => a - b);
  return sorted[Math.floor(sorted.length / 2)];
}

describe("final-layer refit", () => {
  it("identity dictionary on a linear system recovers the true matrix", () => {
    // dataset: x' = diag(0.9, 0.8) x on a uniform grid, identity observables
    const lam = [0.9, 0.8];
    const rows = ["x1,x2,y1,y2"];
    for (let i = 0; i < 30; i++) {
      for (let j = 0; j < 30; j++) {
        const x1 = -1 + (2 * i) / 29;
        const x2 = -1 + (2 * j) / 29;
        rows.push(`${x1},${x2},${lam[0] * x1},${lam[1] * x2}`);
      }
    }
    const data = path.join(tmp, "linear.csv");
    fs.writeFileSync(data, rows.join("\n") + "\n");
    const weights = path.join(tmp, "identity.json");
    fs.writeFileSync(
      weights,
      JSON.stringify({
        input_dim: 2,
        include_state: false,
        layers: [{ w: [[1, 0], [0, 1]], b: [0, 0], act: "linear" }],
      }),
    );
    const model = path.join(tmp, "linear_dde.json");
    const res = spawnSync(
      PYTHON,
      ["-m", "kdde", "fit", "--method", "dde", "--dict", `mlp:${weights}`,
       "--data", data, "--out", model],
      { encoding: "utf8" },
    );
    expect(res.status, res.stderr).toBe(0);
    const A = JSON.parse(fs.readFileSync(model, "utf8")).A as number[][];
    expect(Math.abs(A[0][0] - 0.9)).toBeLessThan(1e-3);
    expect(Math.abs(A[1][1] - 0.8)).toBeLessThan(1e-3);
    expect(Math.abs(A[0][1])).toBeLessThan(1e-3);
    expect(Math.abs(A[1][0])).toBeLessThan(1e-3);
  });

  it("training loss converges on the pendulum dataset (sanity)", async () => {
    const data = path.join(tmp, "sanity.csv");
    genTrajectories(data, 11);
    const dataset = loadDataset(data);
    const trajectories = segmentTrajectories(dataset);
    const split = splitTrajectories(trajectories.length, 0.2, 11);
    const pairs = pairsFromTrajectories(trajectories, split.train);
    const result = await train(pairs.x, pairs.y, { ...DEFAULT_CONFIG, seed: 11, epochs: 120 });
    const hist = result.lossHistory;
    expect(hist.every(Number.isFinite)).toBe(true);
    expect(hist.at(-1)!).toBeLessThan(0.05 * hist[0]);
    // constant-rate Adam oscillates once it reaches its noise floor, so
    // strict per-epoch monotonicity tops out well below 1; require the
    // sane majority and report the measured fraction
    let nonincreasing = 0;
    for (let i = 1; i < hist.length; i++) {
      if (hist[i] <= hist[i - 1]) nonincreasing += 1;
    }
    const fraction = nonincreasing / (hist.length - 1);
    console.log(
      `training-loss sanity: final/initial ${(hist.at(-1)! / hist[0]).toExponential(2)}, ` +
        `nonincreasing transitions ${(100 * fraction).toFixed(1)}%`,
    );
    expect(fraction).toBeGreaterThanOrEqual(0.5);
  });

  it("mesh-weighted refit beats joint training over 20 steps (5 seeds)", async () => {
    const reports: ComparisonReport[] = [];
    for (let seed = 0; seed < 5; seed++) {
      const dir = path.join(tmp, `seed${seed}`);
      fs.mkdirSync(dir, { recursive: true });
      const data = path.join(dir, "traj.csv");
      genTrajectories(data, seed);
      await trainRun(data, path.join(dir, "run"), { seed });
      const report = refitRun(path.join(dir, "run"));
      reports.push(report);
      console.log(
        `seed ${seed}: 1-step ${report.oneStep.nn.toExponential(2)} -> ` +
          `${report.oneStep.dde.toExponential(2)}, 20-step ` +
          `${report.twentyStep.nn.toFixed(4)} -> ${report.twentyStep.dde.toFixed(4)} ` +
          `(${(100 * report.improvementTwentyStep).toFixed(1)}%)`,
      );
      expect(fs.existsSync(path.join(dir, "run", "report.md"))).toBe(true);
      expect(fs.existsSync(path.join(dir, "run", "report.json"))).toBe(true);
    }

    // 20-step: refit never exceeds the jointly trained layer's SSE
    for (const r of reports) {
      expect(r.twentyStep.dde).toBeLessThanOrEqual(r.twentyStep.nn);
    }
    // and improves by at least 20% in the median
    const medianImprovement = median(reports.map((r) => r.improvementTwentyStep));
    // 1-step: within 10% of the jointly trained layer in the median
    // (one-sided: being better than the baseline is not a failure)
    const oneStepNn = median(reports.map((r) => r.oneStep.nn));
    const oneStepDde = median(reports.map((r) => r.oneStep.dde));
    const ok =
      medianImprovement >= 0.2 && oneStepDde <= 1.1 * oneStepNn;
    console.log(
      `ACCEPTANCE table-v-analogue: ${ok ? "PASS" : "FAIL"}  ` +
        `[median 20-step improvement ${(100 * medianImprovement).toFixed(1)}%, ` +
        `median 1-step ${oneStepNn.toExponential(2)} vs ${oneStepDde.toExponential(2)}]`,
    );
    expect(medianImprovement).toBeGreaterThanOrEqual(0.2);
    expect(oneStepDde).toBeLessThanOrEqual(1.1 * oneStepNn);
  }, 900_000);
});
