import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "happy-dom",
    environmentOptions: {
      happyDOM: {
        settings: {
          // the e2e suite talks to local backend + fixture servers, which
          // live on other origins than the test page
          fetch: { disableSameOriginPolicy: true },
        },
      },
    },
    testTimeout: 30_000,
    hookTimeout: 90_000,
  },
});
