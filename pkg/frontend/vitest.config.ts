import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["tests/**/*.test.ts"],
    testTimeout: 20_000,
    hookTimeout: 120_000,
    // the integration suite drives one server-backed workbench end to end,
    // so files must not share state across parallel workers
    fileParallelism: false,
  },
});
