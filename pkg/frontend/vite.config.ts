/// <reference types="vitest/config" />
import { defineConfig } from "vite";

export default defineConfig({
  server: { port: 5173 },
  test: {
    globalSetup: ["./vitest.setup.ts"],
    environment: "node",
    testTimeout: 30000,
    hookTimeout: 30000,
  },
});
