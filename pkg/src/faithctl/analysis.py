"""Corpus-level evaluation and human-study statistics.

BLEU is corpus-level with uniform quarter weights on clipped modified n-gram
precisions (n = 1..4), brevity penalty, and no smoothing; any zero corpus
precision zeroes the score. Agreement uses Krippendorff's alpha with the
interval metric, since 1-5 Likert ratings are treated numerically.
"""

from __future__ import annotations

import csv
import math
from collections import Counter
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from typing import IO

from faithctl import entailment, textmeasures
from faithctl.errors import IngestError, JudgeUnavailableError

MEASURE_NAMES = ("no_first_person", "lex_precision", "lex_recall", "entailed")
QUALITY_NAMES = ("fluency", "relevance", "faithfulness", "objectivity")


@dataclass(frozen=True)
class EvalRow:
    id: str
    system_response: str
    reference_response: str
    evidence: str

    def __post_init__(self):
        if not self.id or not self.evidence:
            raise ValueError("id and evidence must be non-empty")


@dataclass(frozen=True)
class EvalReport:
    bleu4: float
    pct_no_first_person: float
    mean_lex_precision: float
    mean_lex_recall: float
    pct_entailed: float | None
    n: int

    def to_dict(self) -> dict:
        return {
            "bleu4": self.bleu4,
            "pct_no_first_person": self.pct_no_first_person,
            "mean_lex_precision": self.mean_lex_precision,
            "mean_lex_recall": self.mean_lex_recall,
            "pct_entailed": self.pct_entailed,
            "n": self.n,
        }

    def to_table(self) -> str:
        headers = ["B4", "N1P%", "Prec", "Rec", "NLI%", "n"]
        nli = "-" if self.pct_entailed is None else f"{100 * self.pct_entailed:.1f}"
        values = [
            f"{100 * self.bleu4:.1f}",
            f"{100 * self.pct_no_first_person:.1f}",
            f"{100 * self.mean_lex_precision:.1f}",
            f"{100 * self.mean_lex_recall:.1f}",
            nli,
            str(self.n),
        ]
        widths = [max(len(h), len(v)) for h, v in zip(headers, values)]
        head = "  ".join(h.rjust(w) for h, w in zip(headers, widths))
        body = "  ".join(v.rjust(w) for v, w in zip(values, widths))
        return head + "\n" + body


def _ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def bleu4(candidates: Sequence[Sequence[str]], references: Sequence[Sequence[str]]) -> float:
    """Corpus BLEU-4, single reference per candidate, no smoothing."""
    if len(candidates) != len(references):
        raise ValueError("candidates and references must have equal length")
    matched = [0, 0, 0, 0]
    total = [0, 0, 0, 0]
    cand_len = 0
    ref_len = 0
    for cand, ref in zip(candidates, references):
        cand_len += len(cand)
        ref_len += len(ref)
        for n in range(1, 5):
            cand_counts = _ngrams(cand, n)
            ref_counts = _ngrams(ref, n)
            total[n - 1] += sum(cand_counts.values())
            matched[n - 1] += sum(
                min(count, ref_counts[gram]) for gram, count in cand_counts.items()
            )
    if any(t == 0 or m == 0 for m, t in zip(matched, total)):
        return 0.0
    log_prec = sum(0.25 * math.log(m / t) for m, t in zip(matched, total))
    bp = 1.0 if cand_len > ref_len else math.exp(1.0 - ref_len / max(cand_len, 1))
    return bp * math.exp(log_prec)


def evaluate(
    rows: Sequence[EvalRow],
    judge: entailment.JudgeConfig,
    lexicon: frozenset[str] | None = None,
) -> EvalReport:
    """Score system outputs: BLEU vs reference, groundedness vs evidence.

    If the judge becomes unavailable the report is still produced with
    ``pct_entailed`` absent.
    """
    if not rows:
        raise ValueError("evaluate requires a non-empty row list")
    lexicon = lexicon or textmeasures.DEFAULT_FIRST_PERSON
    cands = [textmeasures.tokenize(r.system_response) for r in rows]
    refs = [textmeasures.tokenize(r.reference_response) for r in rows]
    n_objective = 0
    precision_sum = 0.0
    recall_sum = 0.0
    n_entailed = 0
    entailed_known = True
    for row, cand in zip(rows, cands):
        evidence_toks = textmeasures.tokenize(row.evidence)
        overlap = textmeasures.lexical_overlap(cand, evidence_toks)
        precision_sum += overlap.precision
        recall_sum += overlap.recall
        if textmeasures.objective_voice(cand, lexicon):
            n_objective += 1
        if entailed_known:
            try:
                if entailment.judge(row.evidence, row.system_response, judge).entailed:
                    n_entailed += 1
            except JudgeUnavailableError:
                entailed_known = False
    n = len(rows)
    return EvalReport(
        bleu4=bleu4(cands, refs),
        pct_no_first_person=n_objective / n,
        mean_lex_precision=precision_sum / n,
        mean_lex_recall=recall_sum / n,
        pct_entailed=n_entailed / n if entailed_known else None,
        n=n,
    )


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    """Product-moment correlation; undefined (error) for zero variance."""
    if len(x) != len(y):
        raise ValueError("sequences must have equal length")
    n = len(x)
    if n < 2:
        raise ValueError("need at least 2 points")
    mean_x = sum(x) / n
    mean_y = sum(y) / n
    cov = sum((a - mean_x) * (b - mean_y) for a, b in zip(x, y))
    var_x = sum((a - mean_x) ** 2 for a in x)
    var_y = sum((b - mean_y) ** 2 for b in y)
    if var_x == 0.0 or var_y == 0.0:
        raise ValueError("pearson undefined for zero-variance input")
    return cov / math.sqrt(var_x * var_y)


class RatingsMatrix:
    """Items x raters grid of optional 1-5 ratings, one grid per quality."""

    def __init__(
        self,
        qualities: Sequence[str] = QUALITY_NAMES,
        scale: tuple[int, int] = (1, 5),
    ):
        self.qualities = tuple(qualities)
        self.scale = scale
        # quality -> item -> rater -> rating
        self._cells: dict[str, dict[str, dict[str, float]]] = {q: {} for q in self.qualities}
        self._raters: set[str] = set()

    def add(self, item_id: str, rater_id: str, quality: str, rating: float) -> None:
        lo, hi = self.scale
        if not lo <= rating <= hi:
            raise ValueError(f"rating {rating} outside scale [{lo}, {hi}]")
        self._cells[quality].setdefault(item_id, {})[rater_id] = rating
        self._raters.add(rater_id)

    @property
    def n_raters(self) -> int:
        return len(self._raters)

    def items(self, quality: str) -> list[str]:
        return sorted(self._cells[quality])

    def item_values(self, quality: str) -> list[list[float]]:
        """Per-item rating lists (only the present ratings), item-id order."""
        return [sorted(self._cells[quality][i].values()) for i in self.items(quality)]

    def item_means(self, quality: str) -> dict[str, float]:
        return {
            item: sum(r.values()) / len(r)
            for item, r in self._cells[quality].items()
            if r
        }

    @classmethod
    def from_csv(cls, reader: IO[str]) -> "RatingsMatrix":
        """CSV columns: item_id,rater_id,fluency,relevance,faithfulness,objectivity."""
        matrix = cls()
        rows = csv.DictReader(reader)
        required = {"item_id", "rater_id", *QUALITY_NAMES}
        if rows.fieldnames is None or not required.issubset(rows.fieldnames):
            raise IngestError(f"ratings CSV must have columns {sorted(required)}")
        for lineno, row in enumerate(rows, start=2):
            for quality in QUALITY_NAMES:
                cell = (row[quality] or "").strip()
                if not cell:
                    continue
                try:
                    matrix.add(row["item_id"], row["rater_id"], quality, float(cell))
                except ValueError as exc:
                    raise IngestError(str(exc), line=lineno) from exc
        if matrix.n_raters < 2:
            raise IngestError("ratings require at least 2 raters")
        return matrix


def interval_alpha(units: Sequence[Sequence[float]]) -> float:
    """Krippendorff's alpha with interval distance over per-unit value lists."""
    pairable = [list(u) for u in units if len(u) >= 2]
    if not pairable:
        raise ValueError("no pairable values (need a unit with >= 2 ratings)")
    n_total = sum(len(u) for u in pairable)

    # Observed disagreement from within-unit coincidences.
    observed = 0.0
    for unit in pairable:
        m = len(unit)
        observed += sum(
            (a - b) ** 2 for i, a in enumerate(unit) for j, b in enumerate(unit) if i != j
        ) / (m - 1)
    observed /= n_total

    values = [v for unit in pairable for v in unit]
    expected = sum(
        (a - b) ** 2 for i, a in enumerate(values) for j, b in enumerate(values) if i != j
    ) / (n_total * (n_total - 1))
    if expected == 0.0:
        return 1.0
    return 1.0 - observed / expected


def krippendorff_alpha(ratings: RatingsMatrix, quality: str) -> float:
    """Agreement for one quality's grid."""
    return interval_alpha(ratings.item_values(quality))


@dataclass(frozen=True)
class CorrelationCell:
    r: float | None
    n: int
    error: str | None = None


def correlate(
    ratings: RatingsMatrix,
    measures: Mapping[str, Mapping[str, float]],
) -> dict[tuple[str, str], CorrelationCell]:
    """Pearson r of each automatic measure against each mean human rating.

    ``measures`` maps item id to a dict with the MEASURE_NAMES keys. Items
    missing on either side are dropped pairwise; zero-variance cells surface
    as per-cell errors rather than failing the whole table.
    """
    table: dict[tuple[str, str], CorrelationCell] = {}
    for measure in MEASURE_NAMES:
        for quality in ratings.qualities:
            means = ratings.item_means(quality)
            paired = [
                (float(measures[item][measure]), mean)
                for item, mean in sorted(means.items())
                if item in measures and measure in measures[item]
            ]
            xs = [p[0] for p in paired]
            ys = [p[1] for p in paired]
            try:
                cell = CorrelationCell(r=pearson(xs, ys), n=len(paired))
            except ValueError as exc:
                cell = CorrelationCell(r=None, n=len(paired), error=str(exc))
            table[(measure, quality)] = cell
    return table
