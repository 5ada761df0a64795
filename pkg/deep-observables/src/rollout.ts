/**
 * Multi-step evaluation of a lifted linear model on held-out
 * trajectories: lift the initial state, propagate z <- A z, read the
 * state block, and accumulate squared error against the recorded truth.
 */

import { HiddenStack } from "./mlp.js";

export function liftWith(
  stack: HiddenStack,
  includeState: boolean,
  x: Float64Array,
): Float64Array {
  const h = new Float64Array(stack.outputDim);
  stack.forward(x, h);
  if (!includeState) return h;
  const z = new Float64Array(x.length + h.length);
  z.set(x, 0);
  z.set(h, x.length);
  return z;
}

function matVec(a: Float64Array, m: number, v: Float64Array): Float64Array {
  const out = new Float64Array(m);
  for (let i = 0; i < m; i++) {
    let sum = 0;
    const row = i * m;
    for (let j = 0; j < m; j++) sum += a[row + j] * v[j];
    out[i] = sum;
  }
  return out;
}

/**
 * SSE of an `horizon`-step rollout summed along each trajectory and
 * averaged over trajectories (only those long enough are scored).
 */
export function rolloutSse(
  a: Float64Array,
  m: number,
  stack: HiddenStack,
  includeState: boolean,
  trajectories: Float64Array[][],
  horizon: number,
): number {
  const n = trajectories[0][0].length;
  let total = 0;
  let scored = 0;
  for (const states of trajectories) {
    if (states.length < horizon + 1) continue;
    let z = liftWith(stack, includeState, states[0]);
    let sse = 0;
    for (let t = 1; t <= horizon; t++) {
      z = matVec(a, m, z);
      const truth = states[t];
      for (let d = 0; d < n; d++) {
        const err = z[d] - truth[d];
        sse += err * err;
      }
    }
    total += sse;
    scored += 1;
  }
  if (scored === 0) throw new Error(`no trajectory is ${horizon + 1} states long`);
  return total / scored;
}
