import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";

import { afterAll, describe, expect, it } from "vitest";

import { HiddenStack } from "../src/mlp.js";
import { mulberry32 } from "../src/rng.js";
import { loadWeights, saveWeights, stackToDoc, saveMatrix, loadMatrix } from "../src/weights.js";
import { liftWith } from "../src/rollout.js";

const tmp = fs.mkdtempSync(path.join(os.tmpdir(), "deepobs-"));
afterAll(() => fs.rmSync(tmp, { recursive: true, force: true }));

describe("weight files", () => {
  it("round-trips the stack bit-exactly", () => {
    const stack = new HiddenStack(2, [16, 16, 40], "relu", mulberry32(7));
    const file = path.join(tmp, "w.json");
    saveWeights(file, stack, true);
    const back = loadWeights(file);
    expect(back.includeState).toBe(true);
    expect(back.stack.layers.length).toBe(3);
    for (let l = 0; l < 3; l++) {
      expect(Array.from(back.stack.layers[l].w.value)).toEqual(
        Array.from(stack.layers[l].w.value),
      );
      expect(Array.from(back.stack.layers[l].b.value)).toEqual(
        Array.from(stack.layers[l].b.value),
      );
    }
    // identical forward pass after reload
    const x = Float64Array.from([0.3, -1.1]);
    expect(Array.from(liftWith(back.stack, true, x))).toEqual(
      Array.from(liftWith(stack, true, x)),
    );
  });

  it("writes the documented schema", () => {
    const stack = new HiddenStack(3, [4], "relu", mulberry32(1));
    const file = path.join(tmp, "schema.json");
    saveWeights(file, stack, false);
    const doc = JSON.parse(fs.readFileSync(file, "utf8"));
    expect(doc.input_dim).toBe(3);
    expect(doc.include_state).toBe(false);
    expect(doc.layers).toHaveLength(1);
    expect(doc.layers[0].act).toBe("relu");
    expect(doc.layers[0].w).toHaveLength(4);
    expect(doc.layers[0].w[0]).toHaveLength(3);
    expect(doc.layers[0].b).toHaveLength(4);
  });

  it("identity single layer exports an identity dictionary", () => {
    const stack = new HiddenStack(2, [2], "linear", mulberry32(0));
    stack.layers[0].w.value.set([1, 0, 0, 1]);
    stack.layers[0].b.value.fill(0);
    const doc = stackToDoc(stack, false);
    expect(doc.layers[0].w).toEqual([
      [1, 0],
      [0, 1],
    ]);
    const x = Float64Array.from([0.25, -0.75]);
    expect(Array.from(liftWith(stack, false, x))).toEqual([0.25, -0.75]);
  });

  it("round-trips the transition matrix", () => {
    const m = 5;
    const rng = mulberry32(3);
    const a = Float64Array.from({ length: m * m }, () => rng() * 2 - 1);
    const file = path.join(tmp, "a.json");
    saveMatrix(file, a, m);
    const back = loadMatrix(file);
    expect(back.m).toBe(m);
    expect(Array.from(back.a)).toEqual(Array.from(a));
  });
});
