/**
 * Joint model: learned observables plus a linear transition matrix.
 *
 * The lifted vector is z(x) = [x; h(x)] with h the hidden stack, state
 * block first (matching the dictionary convention of the core toolkit).
 * Training minimizes, over parameters of h and the matrix A,
 *
 *     |z(x') - A z(x)|^2  +  |state(A z(x)) - x'|^2
 *
 * i.e. one-step lifted MSE plus a state-reconstruction term (weight 1),
 * averaged over the batch.  Since the state block of z(x') is x' itself,
 * the combined loss simply double-weights the first n residual
 * components.
 */

import { Adam, HiddenStack, Param, makeParam, Activation } from "./mlp.js";
import { Rng, mulberry32, shuffle } from "./rng.js";

export interface TrainConfig {
  hidden: number[];
  activation: Activation;
  lr: number;
  epochs: number;
  batchSize: number;
  seed: number;
  includeState: boolean;
  /** halve the learning rate every this many epochs (0 = constant) */
  lrDecayEvery: number;
}

export const DEFAULT_CONFIG: TrainConfig = {
  hidden: [16, 16, 40],
  activation: "relu",
  lr: 0.01,
  epochs: 500,
  batchSize: 256,
  seed: 0,
  includeState: true,
  lrDecayEvery: 0,
};

export class KoopmanNet {
  readonly n: number;
  readonly m: number;
  readonly stack: HiddenStack;
  readonly A: Param; // m x m, row-major

  constructor(n: number, config: TrainConfig, rng: Rng) {
    if (!config.includeState) {
      throw new Error("training requires the state block (includeState)");
    }
    this.n = n;
    this.stack = new HiddenStack(n, config.hidden, config.activation, rng);
    this.m = n + this.stack.outputDim;
    this.A = makeParam(this.m * this.m);
    // start the transition near identity: z stays put before training
    for (let i = 0; i < this.m; i++) this.A.value[i * this.m + i] = 1.0;
  }

  /** z(x) = [x; h(x)] */
  lift(x: Float64Array, out: Float64Array): void {
    const h = new Float64Array(this.stack.outputDim);
    this.stack.forward(x, h);
    out.set(x, 0);
    out.set(h, this.n);
  }

  liftMatrix(X: Float64Array[]): Float64Array[] {
    return X.map((x) => {
      const z = new Float64Array(this.m);
      this.lift(x, z);
      return z;
    });
  }

  /** Full loss over a set of pairs (no gradient). */
  loss(X: Float64Array[], Y: Float64Array[]): number {
    const { n, m } = this;
    const hx = new Float64Array(this.stack.outputDim);
    const hy = new Float64Array(this.stack.outputDim);
    const z = new Float64Array(m);
    const zy = new Float64Array(m);
    const A = this.A.value;
    let total = 0;
    for (let s = 0; s < X.length; s++) {
      this.stack.forward(X[s], hx);
      this.stack.forward(Y[s], hy);
      z.set(X[s], 0);
      z.set(hx, n);
      zy.set(Y[s], 0);
      zy.set(hy, n);
      for (let i = 0; i < m; i++) {
        let sum = 0;
        const row = i * m;
        for (let j = 0; j < m; j++) sum += A[row + j] * z[j];
        const r = sum - zy[i];
        total += (i < n ? 2 : 1) * r * r;
      }
    }
    return total / X.length;
  }

  /**
   * Zero all gradients, then accumulate the mean-loss gradient over the
   * listed samples.  Returns the mean loss of those samples.
   */
  gradients(X: Float64Array[], Y: Float64Array[], samples?: ArrayLike<number>): number {
    const { n, m } = this;
    const idx = samples ?? Array.from(X, (_, i) => i);
    const count = idx.length;
    for (const prm of [this.A, ...this.stack.params()]) prm.grad.fill(0);

    const cacheX = this.stack.newCache();
    const cacheY = this.stack.newCache();
    const hx = new Float64Array(this.stack.outputDim);
    const hy = new Float64Array(this.stack.outputDim);
    const z = new Float64Array(m);
    const zy = new Float64Array(m);
    const p = new Float64Array(m);
    const dp = new Float64Array(m);
    const dz = new Float64Array(m);
    let lossSum = 0;

    for (let k = 0; k < count; k++) {
      const s = idx[k];
      const x = X[s];
      const y = Y[s];
      this.stack.forward(x, hx, cacheX);
      this.stack.forward(y, hy, cacheY);
      z.set(x, 0);
      z.set(hx, n);
      zy.set(y, 0);
      zy.set(hy, n);

      const A = this.A.value;
      for (let i = 0; i < m; i++) {
        let sum = 0;
        const row = i * m;
        for (let j = 0; j < m; j++) sum += A[row + j] * z[j];
        p[i] = sum;
      }
      // residual weights: 2 on the state block (lifted + reconstruction)
      for (let i = 0; i < m; i++) {
        const r = p[i] - zy[i];
        const w = i < n ? 2 : 1;
        lossSum += w * r * r;
        dp[i] = 2 * w * r;
      }
      const Ag = this.A.grad;
      for (let i = 0; i < m; i++) {
        const row = i * m;
        const d = dp[i];
        for (let j = 0; j < m; j++) Ag[row + j] += d * z[j];
      }
      dz.fill(0);
      for (let i = 0; i < m; i++) {
        const row = i * m;
        const d = dp[i];
        for (let j = 0; j < m; j++) dz[j] += d * A[row + j];
      }
      this.stack.backward(cacheX, dz.subarray(n));
      // target-side gradient: z(x') enters with weight 1 on hidden rows
      for (let i = n; i < m; i++) dz[i] = -2 * (p[i] - zy[i]);
      this.stack.backward(cacheY, dz.subarray(n));
    }
    for (const prm of [this.A, ...this.stack.params()]) {
      const g = prm.grad;
      for (let i = 0; i < g.length; i++) g[i] /= count;
    }
    return lossSum / count;
  }

  /** One optimizer pass over the data; returns the post-epoch full loss. */
  trainEpoch(
    X: Float64Array[],
    Y: Float64Array[],
    adam: Adam,
    batchSize: number,
    order: Int32Array,
    rng: Rng,
  ): number {
    shuffle(order, rng);
    for (let start = 0; start < order.length; start += batchSize) {
      const stop = Math.min(start + batchSize, order.length);
      this.gradients(X, Y, order.subarray(start, stop));
      adam.step();
    }
    return this.loss(X, Y);
  }
}

export interface TrainResult {
  net: KoopmanNet;
  lossHistory: number[];
}

export async function train(
  X: Float64Array[],
  Y: Float64Array[],
  config: TrainConfig = DEFAULT_CONFIG,
): Promise<TrainResult> {
  if (X.length === 0) throw new Error("empty training set");
  const n = X[0].length;
  const rng = mulberry32(config.seed + 0x9e3779b9);
  const net = new KoopmanNet(n, config, rng);
  const adam = new Adam([net.A, ...net.stack.params()], config.lr);
  const order = new Int32Array(X.length);
  for (let i = 0; i < X.length; i++) order[i] = i;
  const lossHistory: number[] = [];
  for (let epoch = 0; epoch < config.epochs; epoch++) {
    if (config.lrDecayEvery > 0 && epoch > 0 && epoch % config.lrDecayEvery === 0) {
      adam.lr *= 0.5;
    }
    const loss = net.trainEpoch(X, Y, adam, config.batchSize, order, rng);
    if (!Number.isFinite(loss)) {
      throw new Error(`training diverged at epoch ${epoch} (loss ${loss})`);
    }
    lossHistory.push(loss);
    // let the event loop breathe; epochs run tens of milliseconds each
    await new Promise<void>((resolve) => setImmediate(resolve));
  }
  return { net, lossHistory };
}
