import express, { type Express } from "express";

import { generate } from "./generator.js";
import { classify } from "./nli.js";
import { generateRequest, nliRequest } from "./schemas.js";

export interface AppOptions {
  /** Reports whether model backends are ready; /health returns 503 until then. */
  ready?: () => boolean;
}

export function createApp(options: AppOptions = {}): Express {
  const ready = options.ready ?? (() => true);
  const app = express();
  app.use(express.json({ limit: "1mb" }));

  app.get("/health", (_req, res) => {
    if (!ready()) {
      res.status(503).json({ status: "loading" });
      return;
    }
    res.json({ status: "ok" });
  });

  app.post("/nli", (req, res) => {
    if (!ready()) {
      res.status(503).json({ error: "model not loaded" });
      return;
    }
    const parsed = nliRequest.safeParse(req.body);
    if (!parsed.success) {
      res.status(400).json({ error: parsed.error.issues[0].message });
      return;
    }
    res.json(classify(parsed.data.premise, parsed.data.hypothesis));
  });

  app.post("/generate", (req, res) => {
    if (!ready()) {
      res.status(503).json({ error: "model not loaded" });
      return;
    }
    const parsed = generateRequest.safeParse(req.body);
    if (!parsed.success) {
      res.status(400).json({ error: parsed.error.issues[0].message });
      return;
    }
    res.json({ text: generate(parsed.data) });
  });

  return app;
}
