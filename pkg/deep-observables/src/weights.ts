/**
 * Weight-file IO in the core toolkit's MlpWeights schema:
 *
 *   { "input_dim": n,
 *     "layers": [ {"w": [[...]], "b": [...], "act": "relu"|"linear"} ],
 *     "include_state": bool }
 *
 * Only the hidden stack is exported here; the jointly trained transition
 * matrix travels in its own file so the refit step can replace it.
 */

import * as fs from "node:fs";

import { HiddenStack, Activation } from "./mlp.js";
import { fmt17 } from "./data.js";

export interface WeightsDoc {
  input_dim: number;
  layers: { w: number[][]; b: number[]; act: Activation }[];
  include_state: boolean;
}

export function stackToDoc(stack: HiddenStack, includeState: boolean): WeightsDoc {
  return {
    input_dim: stack.inputDim,
    layers: stack.layers.map((layer) => {
      const w: number[][] = [];
      for (let i = 0; i < layer.outDim; i++) {
        const row: number[] = [];
        for (let j = 0; j < layer.inDim; j++) {
          row.push(layer.w.value[i * layer.inDim + j]);
        }
        w.push(row);
      }
      return { w, b: Array.from(layer.b.value), act: layer.act };
    }),
    include_state: includeState,
  };
}

/** Render with 17-significant-digit floats (decimal round-trip exact). */
function render(value: unknown): string {
  if (typeof value === "number") {
    return Number.isInteger(value) && Math.abs(value) < 2 ** 53
      ? String(value)
      : fmt17(value);
  }
  if (value === null || typeof value === "boolean") return JSON.stringify(value);
  if (typeof value === "string") return JSON.stringify(value);
  if (Array.isArray(value)) return "[" + value.map(render).join(",") + "]";
  const obj = value as Record<string, unknown>;
  return (
    "{" +
    Object.entries(obj)
      .map(([k, v]) => JSON.stringify(k) + ":" + render(v))
      .join(",") +
    "}"
  );
}

export function saveWeights(
  path: string,
  stack: HiddenStack,
  includeState: boolean,
): void {
  fs.writeFileSync(path, render(stackToDoc(stack, includeState)) + "\n");
}

export function loadWeights(path: string): { stack: HiddenStack; includeState: boolean } {
  const doc = JSON.parse(fs.readFileSync(path, "utf8")) as WeightsDoc;
  if (!doc.layers?.length || typeof doc.input_dim !== "number") {
    throw new Error(`${path}: not a weight file`);
  }
  return { stack: rebuildStack(doc), includeState: Boolean(doc.include_state) };
}

function rebuildStack(doc: WeightsDoc): HiddenStack {
  const widths = doc.layers.map((spec) => spec.w.length);
  const stack = new HiddenStack(doc.input_dim, widths, "relu", () => 0.5);
  let prev = doc.input_dim;
  for (let l = 0; l < doc.layers.length; l++) {
    const spec = doc.layers[l];
    const layer = stack.layers[l];
    const inDim = spec.w[0].length;
    if (inDim !== prev) throw new Error("layer widths do not chain");
    layer.act = spec.act;
    for (let i = 0; i < layer.outDim; i++) {
      for (let j = 0; j < inDim; j++) layer.w.value[i * inDim + j] = spec.w[i][j];
    }
    layer.b.value.set(spec.b);
    prev = layer.outDim;
  }
  return stack;
}

export function saveMatrix(path: string, a: Float64Array, m: number): void {
  const rows: number[][] = [];
  for (let i = 0; i < m; i++) {
    rows.push(Array.from(a.subarray(i * m, (i + 1) * m)));
  }
  fs.writeFileSync(path, render({ A: rows }) + "\n");
}

export function loadMatrix(path: string): { a: Float64Array; m: number } {
  const doc = JSON.parse(fs.readFileSync(path, "utf8")) as { A: number[][] };
  const m = doc.A.length;
  const a = new Float64Array(m * m);
  for (let i = 0; i < m; i++) {
    if (doc.A[i].length !== m) throw new Error(`${path}: A is not square`);
    for (let j = 0; j < m; j++) a[i * m + j] = doc.A[i][j];
  }
  return { a, m };
}
