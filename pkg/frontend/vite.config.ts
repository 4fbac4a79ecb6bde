/// <reference types="vitest/config" />
import { defineConfig } from "vite";

// base "./" keeps asset URLs relative, so the built page works when the
// service mounts it under /ui instead of at the site root.
export default defineConfig({
  base: "./",
  build: {
    outDir: "dist",
    target: "es2022",
  },
  test: {
    include: ["tests/**/*.test.ts"],
    environment: "node",
    testTimeout: 30000,
    hookTimeout: 60000,
  },
});
