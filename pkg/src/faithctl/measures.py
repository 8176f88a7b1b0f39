"""Per-response groundedness report combining the three measures."""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

from faithctl import entailment, textmeasures

if TYPE_CHECKING:
    from faithctl.corpus import GroundedExample


@dataclass(frozen=True)
class MeasureReport:
    objective_voice: bool
    lex_precision: float
    lex_recall: float
    entailed: bool
    entail_score: float | None = None

    def to_dict(self) -> dict:
        return {
            "objective_voice": self.objective_voice,
            "lex_precision": self.lex_precision,
            "lex_recall": self.lex_recall,
            "entailed": self.entailed,
            "entail_score": self.entail_score,
        }


def measure_response(
    response: str,
    evidence: str,
    judge: entailment.JudgeConfig,
    lexicon: frozenset[str] | None = None,
) -> MeasureReport:
    """Objective voice, lexical precision/recall, and entailment for one response."""
    lexicon = lexicon or textmeasures.DEFAULT_FIRST_PERSON
    response_toks = textmeasures.tokenize(response)
    evidence_toks = textmeasures.tokenize(evidence)
    overlap = textmeasures.lexical_overlap(response_toks, evidence_toks)
    verdict = entailment.judge(evidence, response, judge)
    return MeasureReport(
        objective_voice=textmeasures.objective_voice(response_toks, lexicon),
        lex_precision=overlap.precision,
        lex_recall=overlap.recall,
        entailed=verdict.entailed,
        entail_score=verdict.score,
    )


def measure_example(
    example: "GroundedExample",
    judge: entailment.JudgeConfig,
    lexicon: frozenset[str] | None = None,
) -> MeasureReport:
    """Report for an example's gold response against its evidence."""
    return measure_response(example.response, example.evidence, judge, lexicon=lexicon)
