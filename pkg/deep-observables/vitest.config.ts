import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["test/**/*.test.ts"],
    testTimeout: 900_000,
    hookTimeout: 900_000,
    // training runs block the event loop for tens of seconds; forked
    // workers with one file per fork keep the reporter RPC responsive
    pool: "forks",
    fileParallelism: false,
    poolOptions: { forks: { isolate: true } },
  },
});
