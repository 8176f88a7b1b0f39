import { z } from "zod";

export const nliRequest = z
  .object({
    premise: z.string(),
    hypothesis: z.string(),
  })
  .strict();

export const generateRequest = z
  .object({
    input: z.string().min(1),
    top_p: z.number().gt(0).max(1),
    min_tokens: z.number().int().min(1),
    max_tokens: z.number().int().min(1),
    seed: z.number().int().min(0).optional(),
  })
  .strict()
  .refine((req) => req.max_tokens >= req.min_tokens, {
    message: "max_tokens must be >= min_tokens",
  });

export type NliRequest = z.infer<typeof nliRequest>;
export type GenerateRequest = z.infer<typeof generateRequest>;
