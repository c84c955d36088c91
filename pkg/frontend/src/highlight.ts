// Sentence rendering helpers: which tokens to mark, which to underline.

import type { TokenView } from "./types";

export interface RenderedToken {
  text: string;
  highlighted: boolean;
  cue: boolean;
}

/**
 * Join tokens back into a sentence, flagging the aligned span and the cue
 * words the classifier rationale named. A deleted word (empty span) marks
 * nothing; the caller shows a gap marker instead.
 */
export function renderableTokens(
  tokens: TokenView[],
  span: number[],
  cueWords: string[],
): RenderedToken[] {
  const inSpan = new Set(span);
  const cues = new Set(cueWords.map((w) => w.toLowerCase()));
  return tokens.map((token, i) => ({
    text: token.surface,
    highlighted: inSpan.has(i),
    cue: !inSpan.has(i) && cues.has(token.normalized.toLowerCase()),
  }));
}

/** Indices where a deletion gap marker belongs (before token `index`). */
export function gapPosition(span: number[], fallbackEnd: number): number {
  if (span.length > 0) {
    return span[0];
  }
  return fallbackEnd;
}
