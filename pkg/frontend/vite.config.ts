import { defineConfig } from "vitest/config";

export default defineConfig({
  base: "./",
  build: {
    outDir: "dist",
    target: "es2022",
  },
  test: {
    environment: "jsdom",
    include: ["tests/**/*.test.ts"],
    // the e2e file boots a real server, give its hooks room
    testTimeout: 20000,
    hookTimeout: 40000,
  },
});
