import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "happy-dom",
    globalSetup: "./test/server.ts",
    testTimeout: 30000,
    hookTimeout: 90000,
  },
});
