/**
 * Feed-forward hidden stack with manual backprop and Adam.
 *
 * Weights are flat Float64Arrays (row-major, w[i*in + j] multiplies input
 * j into output i) to keep the training loop allocation-free.
 */

import { Rng, gaussian } from "./rng.js";

export type Activation = "relu" | "linear";

export interface Param {
  value: Float64Array;
  grad: Float64Array;
  m: Float64Array;
  v: Float64Array;
}

export function makeParam(size: number): Param {
  return {
    value: new Float64Array(size),
    grad: new Float64Array(size),
    m: new Float64Array(size),
    v: new Float64Array(size),
  };
}

export interface Layer {
  inDim: number;
  outDim: number;
  act: Activation;
  w: Param; // outDim x inDim
  b: Param; // outDim
}

/** Per-sample forward cache: inputs and pre-activations of every layer. */
export interface ForwardCache {
  inputs: Float64Array[]; // inputs[l] has length layer l inDim
  pre: Float64Array[]; // pre[l] has length layer l outDim
}

export class HiddenStack {
  readonly inputDim: number;
  readonly outputDim: number;
  readonly layers: Layer[];
  // reusable per-layer scratch to keep forward/backward allocation-free
  private outBuf: Float64Array[] = [];
  private dpreBuf: Float64Array[] = [];
  private dinBuf: Float64Array[] = [];

  constructor(inputDim: number, widths: number[], act: Activation, rng: Rng) {
    this.inputDim = inputDim;
    this.layers = [];
    let prev = inputDim;
    for (const width of widths) {
      const layer: Layer = {
        inDim: prev,
        outDim: width,
        act,
        w: makeParam(width * prev),
        b: makeParam(width),
      };
      // He initialization, appropriate for the ReLU stack
      const scale = Math.sqrt(2.0 / prev);
      for (let i = 0; i < layer.w.value.length; i++) {
        layer.w.value[i] = scale * gaussian(rng);
      }
      this.layers.push(layer);
      prev = width;
    }
    this.outputDim = prev;
  }

  private scratch(): void {
    if (this.outBuf.length === this.layers.length) return;
    this.outBuf = this.layers.map((l) => new Float64Array(l.outDim));
    this.dpreBuf = this.layers.map((l) => new Float64Array(l.outDim));
    this.dinBuf = this.layers.map((l) => new Float64Array(l.inDim));
  }

  newCache(): ForwardCache {
    return {
      inputs: this.layers.map((l) => new Float64Array(l.inDim)),
      pre: this.layers.map((l) => new Float64Array(l.outDim)),
    };
  }

  /** Forward pass for one sample; writes into `out` (length outputDim). */
  forward(x: Float64Array, out: Float64Array, cache?: ForwardCache): void {
    this.scratch();
    let cur = x;
    const last = this.layers.length - 1;
    for (let l = 0; l <= last; l++) {
      const layer = this.layers[l];
      const target = l === last ? out : this.outBuf[l];
      const relu = layer.act === "relu";
      if (cache) cache.inputs[l].set(cur);
      const w = layer.w.value;
      const b = layer.b.value;
      const pre = cache ? cache.pre[l] : undefined;
      const inDim = layer.inDim;
      for (let i = 0; i < layer.outDim; i++) {
        let sum = b[i];
        const row = i * inDim;
        for (let j = 0; j < inDim; j++) sum += w[row + j] * cur[j];
        if (pre) pre[i] = sum;
        target[i] = relu && sum < 0 ? 0 : sum;
      }
      cur = target;
    }
  }

  /**
   * Backprop one sample's output gradient through the stack, accumulating
   * parameter gradients.  `cache` must hold the matching forward pass.
   */
  backward(cache: ForwardCache, gradOut: Float64Array): void {
    this.scratch();
    let grad = gradOut;
    for (let l = this.layers.length - 1; l >= 0; l--) {
      const layer = this.layers[l];
      const relu = layer.act === "relu";
      const pre = cache.pre[l];
      const input = cache.inputs[l];
      const dpre = this.dpreBuf[l];
      for (let i = 0; i < layer.outDim; i++) {
        dpre[i] = relu && pre[i] <= 0 ? 0 : grad[i];
      }
      const wg = layer.w.grad;
      const bg = layer.b.grad;
      const inDim = layer.inDim;
      for (let i = 0; i < layer.outDim; i++) {
        const row = i * inDim;
        const d = dpre[i];
        if (d !== 0) {
          for (let j = 0; j < inDim; j++) wg[row + j] += d * input[j];
        }
        bg[i] += d;
      }
      if (l > 0) {
        const w = layer.w.value;
        const next = this.dinBuf[l];
        next.fill(0);
        for (let i = 0; i < layer.outDim; i++) {
          const d = dpre[i];
          if (d === 0) continue;
          const row = i * inDim;
          for (let j = 0; j < inDim; j++) next[j] += d * w[row + j];
        }
        grad = next;
      }
    }
  }

  params(): Param[] {
    const out: Param[] = [];
    for (const layer of this.layers) out.push(layer.w, layer.b);
    return out;
  }
}

export class Adam {
  private t = 0;

  constructor(
    readonly params: Param[],
    public lr: number,
    readonly beta1 = 0.9,
    readonly beta2 = 0.999,
    readonly eps = 1e-8,
  ) {}

  zeroGrad(): void {
    for (const p of this.params) p.grad.fill(0);
  }

  step(): void {
    this.t += 1;
    const c1 = 1 - Math.pow(this.beta1, this.t);
    const c2 = 1 - Math.pow(this.beta2, this.t);
    for (const p of this.params) {
      const { value, grad, m, v } = p;
      for (let i = 0; i < value.length; i++) {
        m[i] = this.beta1 * m[i] + (1 - this.beta1) * grad[i];
        v[i] = this.beta2 * v[i] + (1 - this.beta2) * grad[i] * grad[i];
        value[i] -= (this.lr * (m[i] / c1)) / (Math.sqrt(v[i] / c2) + this.eps);
      }
    }
  }
}
