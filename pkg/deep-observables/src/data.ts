/**
 * Dataset CSV loading and trajectory handling.
 *
 * The core toolkit's dataset format: CSV with header x1..xn,y1..yn plus a
 * JSON provenance sidecar at <path>.json.  Trajectory datasets store
 * pairs trajectory-major, so with the sidecar's steps_per_trajectory the
 * original trajectories can be reassembled for multi-step evaluation.
 */

import * as fs from "node:fs";

export interface Dataset {
  n: number;
  x: Float64Array[];
  y: Float64Array[];
  provenance: Record<string, unknown>;
}

export function loadDataset(path: string): Dataset {
  const text = fs.readFileSync(path, "utf8");
  const lines = text.trim().split(/\r?\n/);
  const header = lines[0].split(",");
  if (header.length % 2 !== 0 || !header[0].startsWith("x")) {
    throw new Error(`${path}: expected header x1..xn,y1..yn`);
  }
  const n = header.length / 2;
  const x: Float64Array[] = [];
  const y: Float64Array[] = [];
  for (let i = 1; i < lines.length; i++) {
    const parts = lines[i].split(",").map(Number);
    if (parts.length !== 2 * n || parts.some((v) => !Number.isFinite(v))) {
      throw new Error(`${path}: bad row ${i}`);
    }
    x.push(Float64Array.from(parts.slice(0, n)));
    y.push(Float64Array.from(parts.slice(n)));
  }
  let provenance: Record<string, unknown> = {};
  const sidecar = path + ".json";
  if (fs.existsSync(sidecar)) {
    provenance = JSON.parse(fs.readFileSync(sidecar, "utf8"));
  }
  return { n, x, y, provenance };
}

export function savePairsCsv(
  path: string,
  x: Float64Array[],
  y: Float64Array[],
  n: number,
): void {
  const header: string[] = [];
  for (let i = 1; i <= n; i++) header.push(`x${i}`);
  for (let i = 1; i <= n; i++) header.push(`y${i}`);
  const rows = [header.join(",")];
  for (let s = 0; s < x.length; s++) {
    const cells: string[] = [];
    for (const v of x[s]) cells.push(fmt17(v));
    for (const v of y[s]) cells.push(fmt17(v));
    rows.push(cells.join(","));
  }
  fs.writeFileSync(path, rows.join("\n") + "\n");
}

/** 17 significant digits: bit-exact decimal round-trip for doubles. */
export function fmt17(v: number): string {
  return v.toPrecision(17).replace(/(\.\d*?)0+(?=e|$)/, "$1").replace(/\.$/, "");
}

/** States of each trajectory (steps+1 per trajectory), from pair rows. */
export function segmentTrajectories(data: Dataset): Float64Array[][] {
  const steps = Number(data.provenance["steps_per_trajectory"]);
  const count = Number(data.provenance["n_trajectories"]);
  if (!Number.isFinite(steps) || !Number.isFinite(count)) {
    throw new Error("dataset provenance lacks trajectory structure");
  }
  if (steps * count !== data.x.length) {
    throw new Error(
      `provenance says ${count}x${steps} pairs, file has ${data.x.length}`,
    );
  }
  const trajectories: Float64Array[][] = [];
  for (let t = 0; t < count; t++) {
    const states: Float64Array[] = [];
    for (let s = 0; s < steps; s++) states.push(data.x[t * steps + s]);
    states.push(data.y[t * steps + steps - 1]);
    trajectories.push(states);
  }
  return trajectories;
}

/** Deterministic train/test split over trajectory indices. */
export function splitTrajectories(
  count: number,
  testFraction: number,
  seed: number,
): { train: number[]; test: number[] } {
  const indices = Array.from({ length: count }, (_, i) => i);
  // seeded Fisher-Yates over plain array
  let a = (seed + 0x51ab) >>> 0;
  const rand = () => {
    a |= 0;
    a = (a + 0x6d2b79f5) | 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
  for (let i = indices.length - 1; i > 0; i--) {
    const j = Math.floor(rand() * (i + 1));
    [indices[i], indices[j]] = [indices[j], indices[i]];
  }
  const nTest = Math.max(1, Math.round(testFraction * count));
  return { test: indices.slice(0, nTest).sort((p, q) => p - q),
           train: indices.slice(nTest).sort((p, q) => p - q) };
}

/** Flatten chosen trajectories back into one-step training pairs. */
export function pairsFromTrajectories(
  trajectories: Float64Array[][],
  chosen: number[],
): { x: Float64Array[]; y: Float64Array[] } {
  const x: Float64Array[] = [];
  const y: Float64Array[] = [];
  for (const t of chosen) {
    const states = trajectories[t];
    for (let s = 0; s + 1 < states.length; s++) {
      x.push(states[s]);
      y.push(states[s + 1]);
    }
  }
  return { x, y };
}
