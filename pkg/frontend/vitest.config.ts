import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["tests/**/*.test.ts"],
    environment: "node",
    environmentOptions: {
      happyDOM: {
        url: "http://localhost/",
        // the scripted-session test talks to a real server on another port
        settings: { fetch: { disableSameOriginPolicy: true } },
      },
    },
    testTimeout: 120_000,
    hookTimeout: 120_000,
    // the two integration suites spawn real servers; keep files sequential
    fileParallelism: false,
  },
});
