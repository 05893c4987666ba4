import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    pool: "forks",
    testTimeout: 60_000,
    hookTimeout: 60_000,
    // the compiler package is huge; load it natively instead of transforming
    server: { deps: { external: ["typescript"] } },
  },
});
