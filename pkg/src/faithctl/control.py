"""Control-code assignment, tercile fitting, augmentation, faithful filter.

Tercile boundaries are fitted once on the training split and reused verbatim
for dev/test, persisted in a small JSON sidecar so coding is reproducible.
"""

from __future__ import annotations

import json
import math
from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from enum import Enum
from typing import IO

from faithctl import corpus, entailment
from faithctl.measures import MeasureReport, measure_example


class VoiceCode(Enum):
    FIRST_PERSON = "<first-person>"
    NO_FIRST_PERSON = "<no-first-person>"


class PrecisionCode(Enum):
    LOW = "<low-prec>"
    MED = "<med-prec>"
    HIGH = "<high-prec>"


class EntailCode(Enum):
    ENTAILED = "<entailed>"
    NON_ENTAILED = "<non-entailed>"


@dataclass(frozen=True)
class ControlCodes:
    voice: VoiceCode
    precision: PrecisionCode
    entailment: EntailCode

    def tokens(self) -> tuple[str, str, str]:
        # Emission order is fixed: voice, precision, entailment.
        return (self.voice.value, self.precision.value, self.entailment.value)


@dataclass(frozen=True)
class TercileBoundaries:
    t_low: float
    t_high: float
    n_fitted: int

    def __post_init__(self):
        if not 0.0 <= self.t_low <= self.t_high <= 1.0:
            raise ValueError("boundaries must satisfy 0 <= t_low <= t_high <= 1")
        if self.n_fitted < 3:
            raise ValueError("boundaries must be fitted on at least 3 values")

    def to_dict(self) -> dict:
        return {"t_low": self.t_low, "t_high": self.t_high, "n_fitted": self.n_fitted}

    @classmethod
    def from_dict(cls, d: dict) -> "TercileBoundaries":
        return cls(t_low=d["t_low"], t_high=d["t_high"], n_fitted=d["n_fitted"])


def fit_terciles(values: Sequence[float]) -> TercileBoundaries:
    """Equal-frequency tercile cut points over training precision values.

    Cut points are the sorted values at 1-based ranks ceil(n/3) and
    ceil(2n/3), which keeps the rule total and deterministic under ties.
    """
    n = len(values)
    if n < 3:
        raise ValueError(f"need at least 3 values to fit terciles, got {n}")
    if any(not 0.0 <= v <= 1.0 for v in values):
        raise ValueError("all values must be in [0, 1]")
    ordered = sorted(values)
    t_low = ordered[math.ceil(n / 3) - 1]
    t_high = ordered[math.ceil(2 * n / 3) - 1]
    return TercileBoundaries(t_low=t_low, t_high=t_high, n_fitted=n)


def assign_precision_code(p: float, b: TercileBoundaries) -> PrecisionCode:
    """Boundary-inclusive bucket: p <= t_low is Low, p <= t_high is Med."""
    if p <= b.t_low:
        return PrecisionCode.LOW
    if p <= b.t_high:
        return PrecisionCode.MED
    return PrecisionCode.HIGH


def assign_codes(
    example: corpus.GroundedExample, report: MeasureReport, b: TercileBoundaries
) -> ControlCodes:
    """Codes describing the gold response, used to tag training inputs."""
    return ControlCodes(
        voice=VoiceCode.NO_FIRST_PERSON if report.objective_voice else VoiceCode.FIRST_PERSON,
        precision=assign_precision_code(report.lex_precision, b),
        entailment=EntailCode.ENTAILED if report.entailed else EntailCode.NON_ENTAILED,
    )


def decode_codes() -> ControlCodes:
    """The fixed decode-time setting: objective, high precision, entailed."""
    return ControlCodes(
        voice=VoiceCode.NO_FIRST_PERSON,
        precision=PrecisionCode.HIGH,
        entailment=EntailCode.ENTAILED,
    )


def augment(
    examples: Sequence[corpus.GroundedExample],
    judge: entailment.JudgeConfig,
    boundaries: TercileBoundaries | None = None,
    budget: int = 1024,
    lexicon: frozenset[str] | None = None,
) -> tuple[TercileBoundaries, Iterator[dict]]:
    """Emit (input-with-codes, target) training records.

    When ``boundaries`` is absent the examples must be the training split;
    terciles are fitted on their precision values and returned so dev/test
    runs can reuse them.
    """
    if not examples:
        raise ValueError("augment requires a non-empty example list")
    reports = [measure_example(ex, judge, lexicon=lexicon) for ex in examples]
    if boundaries is None:
        boundaries = fit_terciles([r.lex_precision for r in reports])

    def records() -> Iterator[dict]:
        for ex, report in zip(examples, reports):
            codes = assign_codes(ex, report, boundaries)
            yield {
                "id": ex.id,
                "input": corpus.serialize_input(ex, codes, max_tokens=budget),
                "target": ex.response,
                "codes": list(codes.tokens()),
                "measures": report.to_dict(),
            }

    return boundaries, records()


def write_boundaries(b: TercileBoundaries, writer: IO[str]) -> None:
    json.dump(b.to_dict(), writer)
    writer.write("\n")


def read_boundaries(reader: IO[str]) -> TercileBoundaries:
    return TercileBoundaries.from_dict(json.load(reader))


def is_faithful(report: MeasureReport, b: TercileBoundaries) -> bool:
    """Objective voice, top-tercile precision, and entailed all at once."""
    return (
        report.objective_voice
        and assign_precision_code(report.lex_precision, b) is PrecisionCode.HIGH
        and report.entailed
    )


def filter_faithful(
    examples: Sequence[corpus.GroundedExample],
    judge: entailment.JudgeConfig,
    b: TercileBoundaries,
    lexicon: frozenset[str] | None = None,
) -> list[corpus.GroundedExample]:
    """Keep only examples whose gold response already satisfies all three measures."""
    return [
        ex
        for ex in examples
        if is_faithful(measure_example(ex, judge, lexicon=lexicon), b)
    ]
