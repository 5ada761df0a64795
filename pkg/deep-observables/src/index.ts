export { Adam, HiddenStack, makeParam } from "./mlp.js";
export type { Activation, Layer, Param } from "./mlp.js";
export { DEFAULT_CONFIG, KoopmanNet, train } from "./koopman.js";
export type { TrainConfig, TrainResult } from "./koopman.js";
export {
  loadDataset,
  pairsFromTrajectories,
  savePairsCsv,
  segmentTrajectories,
  splitTrajectories,
} from "./data.js";
export type { Dataset } from "./data.js";
export { loadMatrix, loadWeights, saveMatrix, saveWeights, stackToDoc } from "./weights.js";
export { liftWith, rolloutSse } from "./rollout.js";
export { refitRun, reportMarkdown, trainRun, PYTHON } from "./refit.js";
export type { ComparisonReport, RunArtifacts } from "./refit.js";
export { gaussian, mulberry32, shuffle } from "./rng.js";
