import { defineConfig } from "vitest/config";

export default defineConfig({
  server: {
    proxy: {
      // forward API calls to a locally running studio service
      "/sessions": "http://127.0.0.1:8700",
      "/jobs": "http://127.0.0.1:8700",
      "/prompt_sets": "http://127.0.0.1:8700",
    },
  },
  test: {
    environment: "jsdom",
    include: ["tests/**/*.test.ts"],
  },
});
