# cython: language_level=3
"""Compiled text kernels; semantics mirror faithctl._pure_kernel exactly."""

from cpython.unicode cimport Py_UNICODE_ISALNUM


def tokenize_kernel(str text):
    """Lowercase and split into word tokens (see the pure kernel docstring)."""
    cdef str lowered = text.lower()
    cdef Py_ssize_t n = len(lowered)
    cdef Py_ssize_t i = 0
    cdef Py_ssize_t start
    cdef Py_UCS4 ch
    tokens = []
    while i < n:
        if Py_UNICODE_ISALNUM(lowered[i]):
            start = i
            i += 1
            while i < n:
                ch = lowered[i]
                if Py_UNICODE_ISALNUM(ch):
                    i += 1
                elif ch == u"'" and i + 1 < n and Py_UNICODE_ISALNUM(lowered[i + 1]):
                    i += 1
                else:
                    break
            tokens.append(lowered[start:i])
        else:
            i += 1
    return tokens


def overlap_counts(list response, list evidence):
    """Count token occurrences covered by the other side's type set."""
    cdef set evidence_types = set(evidence)
    cdef set response_types = set(response)
    cdef Py_ssize_t matched_response = 0
    cdef Py_ssize_t matched_evidence = 0
    for tok in response:
        if tok in evidence_types:
            matched_response += 1
    for tok in evidence:
        if tok in response_types:
            matched_evidence += 1
    return matched_response, matched_evidence
