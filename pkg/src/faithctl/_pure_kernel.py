"""Pure-Python text kernels.

Fallback for :mod:`faithctl._speedups`; both must implement identical
semantics (the test suite cross-checks them when the extension is built).
"""

from __future__ import annotations


def tokenize_kernel(text: str) -> list[str]:
    """Lowercase and split into word tokens.

    A token is a maximal run of alphanumeric characters, optionally joined
    by apostrophes that sit between two alphanumerics ("i'm" stays one
    token, "dogs'" drops the trailing apostrophe).
    """
    lowered = text.lower()
    n = len(lowered)
    tokens: list[str] = []
    i = 0
    while i < n:
        if lowered[i].isalnum():
            start = i
            i += 1
            while i < n:
                ch = lowered[i]
                if ch.isalnum():
                    i += 1
                elif ch == "'" and i + 1 < n and lowered[i + 1].isalnum():
                    i += 1
                else:
                    break
            tokens.append(lowered[start:i])
        else:
            i += 1
    return tokens


def overlap_counts(response: list[str], evidence: list[str]) -> tuple[int, int]:
    """Count token occurrences covered by the other side's type set.

    Returns (matched response occurrences, matched evidence occurrences).
    """
    evidence_types = set(evidence)
    response_types = set(response)
    matched_response = 0
    for tok in response:
        if tok in evidence_types:
            matched_response += 1
    matched_evidence = 0
    for tok in evidence:
        if tok in response_types:
            matched_evidence += 1
    return matched_response, matched_evidence
