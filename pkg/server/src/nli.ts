/** Deterministic lexical NLI backend.
 *
 * Stands in for an MNLI checkpoint behind the same wire shape: scores the
 * hypothesis by how much of its content vocabulary the premise covers, with a
 * negation-mismatch check pushing mass toward contradiction. Swap this module
 * for a real model without touching the HTTP layer.
 */

import { counts, tokenize } from "./tokenize.js";

/** Index-to-label order, fixed by the wire contract. */
export const LABELS = ["entailment", "neutral", "contradiction"] as const;
export type NliLabel = (typeof LABELS)[number];

export interface NliResult {
  label: NliLabel;
  probs: Record<NliLabel, number>;
}

const FUNCTION_WORDS = new Set(
  (
    "a an the and or but if while of to in on at by for with about against " +
    "between into through during before after above below from up down out " +
    "over under again further then once here there when where why how all " +
    "any both each few more most other some such no nor not only own same " +
    "so than too very can will just is are was were be been being have has " +
    "had do does did am it its it's this that these those i me my we our you " +
    "your he him his she her they them their what which who whom as"
  ).split(" ")
);

const NEGATIONS = new Set(["not", "no", "never", "nor", "cannot", "n't", "without"]);

function contentTokens(tokens: string[]): string[] {
  const kept = tokens.filter((t) => !FUNCTION_WORDS.has(t));
  return kept.length > 0 ? kept : tokens;
}

function hasNegation(tokens: string[]): boolean {
  return tokens.some((t) => NEGATIONS.has(t) || t.endsWith("n't"));
}

export function classify(premise: string, hypothesis: string): NliResult {
  const premTokens = tokenize(premise);
  const hypTokens = tokenize(hypothesis);
  const premCounts = counts(contentTokens(premTokens));
  const hyp = contentTokens(hypTokens);

  let coverage = 1.0;
  if (hyp.length > 0) {
    let covered = 0;
    const remaining = new Map(premCounts);
    for (const tok of hyp) {
      const left = remaining.get(tok) ?? 0;
      if (left > 0) {
        covered += 1;
        remaining.set(tok, left - 1);
      }
    }
    coverage = covered / hyp.length;
  }

  const negMismatch = hasNegation(premTokens) !== hasNegation(hypTokens);
  // Unnormalized class scores; exp keeps them positive and monotone in coverage.
  const wEntail = Math.exp(6 * (coverage - 0.75)) * (negMismatch ? 0.05 : 1);
  const wNeutral = 1.0;
  const wContra = negMismatch ? 1.5 + coverage : 0.05;
  const total = wEntail + wNeutral + wContra;

  const probs: Record<NliLabel, number> = {
    entailment: wEntail / total,
    neutral: wNeutral / total,
    contradiction: wContra / total,
  };
  let label: NliLabel = "neutral";
  for (const cand of LABELS) {
    if (probs[cand] > probs[label]) label = cand;
  }
  return { label, probs };
}
