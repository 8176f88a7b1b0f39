/** Deterministic seeded text generator behind the /generate contract.
 *
 * A real decoder would run a seq2seq checkpoint; this backend samples from a
 * unigram distribution grounded in the evidence segment of the serialized
 * input, through the same nucleus (top-p) filter a real sampler would use.
 * Reproducible given a seed, which is all the wire contract promises.
 */

import { mulberry32 } from "./rng.js";
import { counts, tokenize } from "./tokenize.js";

export interface GenerateParams {
  input: string;
  top_p: number;
  min_tokens: number;
  max_tokens: number;
  seed?: number;
}

// Connective filler so outputs read as sentences even off short evidence.
const FILLER = ["the", "is", "a", "of", "and", "it", "also", "known", "for", "with"];

/** Pull the evidence span out of a serialized dialogue input, if present. */
function evidenceTokens(input: string): string[] {
  const match = /evidence:\s*(.*?)(?:<speaker\d>|$)/s.exec(input);
  const span = match ? match[1] : input;
  return tokenize(span);
}

interface WeightedToken {
  token: string;
  prob: number;
}

/** Keep the smallest top-probability prefix with cumulative mass >= p. */
export function nucleus(dist: WeightedToken[], p: number): WeightedToken[] {
  const sorted = [...dist].sort((a, b) => b.prob - a.prob);
  const kept: WeightedToken[] = [];
  let mass = 0;
  for (const entry of sorted) {
    kept.push(entry);
    mass += entry.prob;
    if (mass >= p) break;
  }
  const norm = kept.reduce((acc, e) => acc + e.prob, 0);
  return kept.map((e) => ({ token: e.token, prob: e.prob / norm }));
}

function unigramDistribution(input: string): WeightedToken[] {
  const weights = new Map<string, number>();
  for (const [tok, n] of counts(evidenceTokens(input))) {
    weights.set(tok, n * 4);
  }
  for (const tok of FILLER) {
    weights.set(tok, (weights.get(tok) ?? 0) + 1);
  }
  const total = [...weights.values()].reduce((a, b) => a + b, 0);
  return [...weights.entries()].map(([token, w]) => ({ token, prob: w / total }));
}

export function generate(params: GenerateParams): string {
  const seed = params.seed ?? Math.floor(Math.random() * 0x7fffffff);
  const rng = mulberry32(seed);
  const pool = nucleus(unigramDistribution(params.input), params.top_p);

  const span = params.max_tokens - params.min_tokens + 1;
  const length = params.min_tokens + Math.floor(rng() * span);
  const words: string[] = [];
  for (let i = 0; i < length; i += 1) {
    const roll = rng();
    let acc = 0;
    let picked = pool[pool.length - 1].token;
    for (const entry of pool) {
      acc += entry.prob;
      if (roll < acc) {
        picked = entry.token;
        break;
      }
    }
    words.push(picked);
  }
  return words.join(" ");
}
