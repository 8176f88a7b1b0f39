"""Tokenization, the objective-voice detector, and lexical precision/recall.

The token kernels have two interchangeable implementations: a compiled
extension (built from ``_speedups.pyx``) and a pure-Python fallback. The
compiled one is picked at import time when available; set
``FAITHCTL_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import functools
import os
from dataclasses import dataclass
from importlib import resources

from faithctl import _pure_kernel

if os.environ.get("FAITHCTL_PURE_PYTHON") == "1":
    _kernel = _pure_kernel
    KERNEL_BACKEND = "pure"
else:
    try:
        from faithctl import _speedups as _kernel  # type: ignore[no-redef]

        KERNEL_BACKEND = "compiled"
    except ImportError:
        _kernel = _pure_kernel
        KERNEL_BACKEND = "pure"


def tokenize(text: str) -> list[str]:
    """Lowercase word tokens: alphanumeric runs with internal apostrophes."""
    return _kernel.tokenize_kernel(text)


DEFAULT_FIRST_PERSON = frozenset(
    {"i", "me", "my", "mine", "myself", "i'm", "i've", "i'll", "i'd"}
)


def load_lexicon(path: str) -> frozenset[str]:
    """Read a one-token-per-line lexicon file; blank lines ignored."""
    with open(path, encoding="utf-8") as fh:
        words = frozenset(line.strip().lower() for line in fh if line.strip())
    if not words:
        raise ValueError(f"lexicon file {path!r} is empty")
    return words


@functools.cache
def load_function_words() -> frozenset[str]:
    """Bundled function-word stoplist used by the heuristic entailment judge."""
    text = resources.files("faithctl.data").joinpath("function_words.txt").read_text("utf-8")
    return frozenset(line.strip() for line in text.splitlines() if line.strip())


def objective_voice(tokens: list[str], lexicon: frozenset[str] = DEFAULT_FIRST_PERSON) -> bool:
    """True iff no token is a first-person-singular marker."""
    return not any(tok in lexicon for tok in tokens)


@dataclass(frozen=True)
class LexOverlap:
    precision: float
    recall: float
    matched_response_tokens: int
    response_len: int
    evidence_len: int


def lexical_overlap(response: list[str], evidence: list[str]) -> LexOverlap:
    """Occurrence-level unigram precision/recall of response against evidence.

    Empty response scores precision 0.0 so degenerate outputs never pass
    downstream thresholds; empty evidence makes recall vacuously 1.0.
    """
    matched_response, matched_evidence = _kernel.overlap_counts(response, evidence)
    precision = matched_response / len(response) if response else 0.0
    recall = matched_evidence / len(evidence) if evidence else 1.0
    return LexOverlap(
        precision=precision,
        recall=recall,
        matched_response_tokens=matched_response,
        response_len=len(response),
        evidence_len=len(evidence),
    )
