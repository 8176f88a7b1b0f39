/** Lowercased word tokens: alphanumeric runs, apostrophes kept only between
 * alphanumerics ("i'm" is one token, "dogs'" drops the trailing quote). */
const TOKEN_RE = /[a-z0-9]+(?:'[a-z0-9]+)*/g;

export function tokenize(text: string): string[] {
  return text.toLowerCase().match(TOKEN_RE) ?? [];
}

export function counts(tokens: string[]): Map<string, number> {
  const out = new Map<string, number>();
  for (const tok of tokens) out.set(tok, (out.get(tok) ?? 0) + 1);
  return out;
}
