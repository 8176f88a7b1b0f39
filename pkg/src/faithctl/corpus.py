"""Data model for grounded dialogues: ingestion, extraction, serialization, stats.

An example is one (history, evidence, response) triple where the response is
a wizard turn replying to an apprentice turn and the evidence is the span the
wizard grounded that reply in.
"""

from __future__ import annotations

import json
import logging
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from enum import Enum
from typing import IO, TYPE_CHECKING

from faithctl.errors import IngestError, InputTooLongError

if TYPE_CHECKING:
    from faithctl.control import ControlCodes
    from faithctl.entailment import JudgeConfig

log = logging.getLogger(__name__)


class Speaker(Enum):
    WIZARD = "wizard"
    APPRENTICE = "apprentice"


# The apprentice (knowledge seeker) is the conversation partner, so it gets
# the <speaker1> slot; the wizard's own turns are <speaker2>.
SPEAKER_TOKENS = {Speaker.APPRENTICE: "<speaker1>", Speaker.WIZARD: "<speaker2>"}


class Split(Enum):
    TRAIN = "train"
    DEV_SEEN = "dev_seen"
    DEV_UNSEEN = "dev_unseen"
    TEST_SEEN = "test_seen"
    TEST_UNSEEN = "test_unseen"


@dataclass(frozen=True)
class Turn:
    speaker: Speaker
    text: str

    def __post_init__(self):
        if not self.text.strip():
            raise ValueError("turn text must be non-empty")


@dataclass(frozen=True)
class GroundedExample:
    id: str
    topic: str
    split: Split
    history: tuple[Turn, ...]
    evidence: str
    response: str

    def __post_init__(self):
        if not self.history:
            raise ValueError("history must be non-empty")
        if self.history[-1].speaker is not Speaker.APPRENTICE:
            raise ValueError("final history turn must be by the apprentice")
        if not self.evidence.strip():
            raise ValueError("evidence must be non-empty")
        if not self.response.strip():
            raise ValueError("response must be non-empty")


@dataclass(frozen=True)
class CorpusStats:
    n_examples: int
    pct_first_person: float
    mean_lex_precision: float
    pct_entailed: float
    per_split: dict[Split, int] = field(hash=False)

    def to_dict(self) -> dict:
        return {
            "n_examples": self.n_examples,
            "pct_first_person": self.pct_first_person,
            "mean_lex_precision": self.mean_lex_precision,
            "pct_entailed": self.pct_entailed,
            "per_split": {s.value: c for s, c in self.per_split.items()},
        }


class Format(Enum):
    CANONICAL = "canonical"
    NATIVE = "native"


def _example_from_record(rec: dict) -> GroundedExample:
    try:
        history = tuple(
            Turn(speaker=Speaker(t["speaker"]), text=t["text"]) for t in rec["history"]
        )
        return GroundedExample(
            id=rec["id"],
            topic=rec["topic"],
            split=Split(rec["split"]),
            history=history,
            evidence=rec["evidence"],
            response=rec["response"],
        )
    except (KeyError, ValueError, TypeError) as exc:
        raise IngestError(f"bad record: {exc}") from exc


def example_to_record(ex: GroundedExample) -> dict:
    return {
        "id": ex.id,
        "topic": ex.topic,
        "split": ex.split.value,
        "history": [{"speaker": t.speaker.value, "text": t.text} for t in ex.history],
        "evidence": ex.evidence,
        "response": ex.response,
    }


def ingest(
    reader: IO[str],
    format: Format = Format.CANONICAL,
    split: Split = Split.TRAIN,
    skip_bad_records: bool = False,
) -> list[GroundedExample]:
    """Read all wizard-response examples from a stream, in file order.

    Canonical input is one JSON object per line; native input is the public
    dataset's dialogue JSON (the ``split`` argument labels it, since the
    native files do not carry a split field).
    """
    if format is Format.NATIVE:
        return _ingest_native(reader, split, skip_bad_records)

    examples = []
    for lineno, line in enumerate(reader, start=1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise IngestError(f"malformed JSON: {exc.msg}", line=lineno) from exc
        try:
            examples.append(_example_from_record(rec))
        except IngestError as exc:
            if skip_bad_records:
                log.warning("skipping line %d: %s", lineno, exc)
                continue
            raise IngestError(str(exc), line=lineno) from exc
    return examples


def emit(examples: Iterable[GroundedExample], writer: IO[str]) -> int:
    """Write examples as canonical JSONL; inverse of canonical ingest."""
    n = 0
    for ex in examples:
        writer.write(json.dumps(example_to_record(ex), ensure_ascii=False) + "\n")
        n += 1
    return n


def _ingest_native(reader: IO[str], split: Split, skip_bad_records: bool) -> list[GroundedExample]:
    try:
        payload = json.load(reader)
    except json.JSONDecodeError as exc:
        raise IngestError(f"malformed JSON: {exc.msg}") from exc
    if isinstance(payload, dict) and "data" in payload:
        payload = payload["data"]
    if not isinstance(payload, list):
        raise IngestError("native file must be a list of dialogues")

    examples = []
    for d_idx, dialogue in enumerate(payload):
        try:
            topic = dialogue.get("chosen_topic", "")
            turns = []
            evidence_by_index: dict[int, str] = {}
            for t_idx, entry in enumerate(dialogue["dialog"]):
                label = entry["speaker"]
                if "wizard" in label.lower():
                    speaker = Speaker.WIZARD
                elif "apprentice" in label.lower():
                    speaker = Speaker.APPRENTICE
                else:
                    raise IngestError(f"unknown speaker label {label!r}")
                turns.append(Turn(speaker=speaker, text=entry["text"]))
                checked = entry.get("checked_sentence") or {}
                sentences = [v for k, v in checked.items() if k != "no_passages_used"]
                if sentences:
                    evidence_by_index[t_idx] = " ".join(sentences)
            examples.extend(
                extract_examples(
                    turns,
                    evidence_by_index,
                    topic=topic,
                    split=split,
                    id_prefix=f"d{d_idx}",
                )
            )
        except (IngestError, KeyError, ValueError, TypeError) as exc:
            if skip_bad_records:
                log.warning("skipping dialogue %d: %s", d_idx, exc)
                continue
            raise IngestError(f"dialogue {d_idx}: {exc}") from exc
    return examples


def extract_examples(
    turns: Sequence[Turn],
    evidence_by_index: Mapping[int, str],
    topic: str = "",
    split: Split = Split.TRAIN,
    id_prefix: str = "ex",
) -> list[GroundedExample]:
    """One example per wizard turn that directly answers an apprentice turn.

    The turn must carry an evidence annotation; its history is every strictly
    earlier turn. Opening wizard turns and consecutive wizard turns yield
    nothing.
    """
    examples = []
    for i, turn in enumerate(turns):
        if turn.speaker is not Speaker.WIZARD:
            continue
        if i == 0 or turns[i - 1].speaker is not Speaker.APPRENTICE:
            continue
        evidence = evidence_by_index.get(i)
        if not evidence or not evidence.strip():
            continue
        examples.append(
            GroundedExample(
                id=f"{id_prefix}-t{i}",
                topic=topic,
                split=split,
                history=tuple(turns[:i]),
                evidence=evidence,
                response=turn.text,
            )
        )
    return examples


def _token_count(text: str) -> int:
    return len(text.split())


def serialize_input(
    example: GroundedExample,
    codes: "ControlCodes | None" = None,
    max_tokens: int = 1024,
) -> str:
    """Flatten one example into the model input string.

    Layout: control-code tokens (fixed order), then ``evidence:`` plus the
    evidence, then the history turns oldest first, each prefixed with its
    speaker token. Whole turns are dropped oldest-first until the
    whitespace-token count fits ``max_tokens``; codes, evidence and the final
    turn are never dropped.
    """
    prefix: list[str] = []
    if codes is not None:
        prefix.extend(codes.tokens())
    prefix.append("evidence:")
    prefix.append(example.evidence)

    turn_pieces = [
        (SPEAKER_TOKENS[t.speaker], t.text) for t in example.history
    ]
    fixed_cost = sum(_token_count(p) for p in prefix)
    turn_costs = [1 + _token_count(text) for _, text in turn_pieces]

    keep_from = 0
    total = fixed_cost + sum(turn_costs)
    while total > max_tokens and keep_from < len(turn_pieces) - 1:
        total -= turn_costs[keep_from]
        keep_from += 1
    if total > max_tokens:
        raise InputTooLongError(
            f"input too long: {total} tokens with only the final turn kept, "
            f"budget {max_tokens}"
        )

    pieces = list(prefix)
    for prefix_tok, text in turn_pieces[keep_from:]:
        pieces.append(prefix_tok)
        pieces.append(text)
    return " ".join(pieces)


def corpus_stats(
    examples: Sequence[GroundedExample],
    judge: "JudgeConfig",
    lexicon: frozenset[str] | None = None,
) -> CorpusStats:
    """Corpus-level fractions of the three groundedness measures."""
    from faithctl.measures import measure_example

    if not examples:
        raise ValueError("corpus_stats requires a non-empty example list")
    per_split: dict[Split, int] = {}
    n_first_person = 0
    n_entailed = 0
    precision_sum = 0.0
    for ex in examples:
        per_split[ex.split] = per_split.get(ex.split, 0) + 1
        report = measure_example(ex, judge, lexicon=lexicon)
        if not report.objective_voice:
            n_first_person += 1
        if report.entailed:
            n_entailed += 1
        precision_sum += report.lex_precision
    n = len(examples)
    return CorpusStats(
        n_examples=n,
        pct_first_person=n_first_person / n,
        mean_lex_precision=precision_sum / n,
        pct_entailed=n_entailed / n,
        per_split=per_split,
    )
