/// <reference types="vitest/config" />
import { defineConfig } from "vite";

export default defineConfig({
  server: {
    // dev convenience: forward API calls to a local captionlens serve
    proxy: {
      "/api": "http://127.0.0.1:8765",
    },
  },
  preview: {
    proxy: {
      "/api": "http://127.0.0.1:8765",
    },
  },
  test: {
    environment: "happy-dom",
    include: ["tests/**/*.test.ts"],
  },
});
