"""Decode-time control: nucleus filtering and resample-until-satisfied.

Candidates are drawn one at a time and checked against the groundedness
criteria; the first fully satisfying draw wins. After ``max_draws`` failures
the fallback is the candidate satisfying the most criteria, ties broken by
higher lexical precision and then by earlier draw.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Protocol

import requests

from faithctl import control, corpus, entailment, textmeasures
from faithctl.errors import FaithctlError, GeneratorUnavailableError, JudgeUnavailableError, ProtocolError


@dataclass(frozen=True)
class GenerationConfig:
    nucleus_p: float = 0.6
    min_tokens: int = 5
    max_tokens: int = 64
    seed: int | None = None

    def __post_init__(self):
        if not 0.0 < self.nucleus_p <= 1.0:
            raise ValueError("nucleus_p must be in (0, 1]")
        if self.min_tokens > self.max_tokens:
            raise ValueError("min_tokens must not exceed max_tokens")


class Criterion(Enum):
    OBJECTIVE_VOICE = "objective_voice"
    HIGH_PRECISION = "high_precision"
    ENTAILED = "entailed"


ALL_CRITERIA = frozenset(Criterion)


@dataclass(frozen=True)
class ResampleConfig:
    boundaries: control.TercileBoundaries
    judge: entailment.JudgeConfig
    max_draws: int = 10
    criteria: frozenset[Criterion] = ALL_CRITERIA

    def __post_init__(self):
        if self.max_draws < 1:
            raise ValueError("max_draws must be at least 1")
        if not self.criteria:
            raise ValueError("criteria must be non-empty")


@dataclass(frozen=True)
class Candidate:
    text: str
    draw_index: int
    satisfied: dict[Criterion, bool] = field(hash=False)
    lex_precision: float = 0.0

    @property
    def n_satisfied(self) -> int:
        return sum(self.satisfied.values())


@dataclass(frozen=True)
class ResampleResult:
    chosen: Candidate
    draws_used: int
    accepted: bool
    fallback: bool

    def __post_init__(self):
        if self.accepted and self.fallback:
            raise ValueError("an accepted result cannot be a fallback")


class ResampleAborted(FaithctlError):
    """Judge became unavailable mid-run; carries the partial draw log."""

    def __init__(self, message: str, draws: list[Candidate]):
        super().__init__(message)
        self.draws = draws


def nucleus_filter(probs: list[float], p: float) -> list[float]:
    """Zero out all but the top-p nucleus and renormalize.

    Keeps the smallest prefix of the descending-sorted distribution whose
    cumulative mass reaches ``p``; positions outside the nucleus become 0 and
    the kept mass is rescaled to sum to 1. Index positions are preserved.
    """
    if not probs:
        raise ValueError("probability list must be non-empty")
    if any(q < 0 for q in probs):
        raise ValueError("probabilities must be non-negative")
    if abs(sum(probs) - 1.0) > 1e-9:
        raise ValueError("probabilities must sum to 1")
    if not 0.0 < p <= 1.0:
        raise ValueError("p must be in (0, 1]")

    order = sorted(range(len(probs)), key=lambda i: -probs[i])
    kept: list[int] = []
    cumulative = 0.0
    for i in order:
        kept.append(i)
        cumulative += probs[i]
        if cumulative >= p - 1e-12:
            break
    mass = sum(probs[i] for i in kept)
    out = [0.0] * len(probs)
    for i in kept:
        out[i] = probs[i] / mass
    return out


class Generator(Protocol):
    """Anything that can produce one candidate per (seed, draw_index)."""

    def sample(self, input_text: str, cfg: GenerationConfig, seed: int, draw_index: int) -> str:
        ...


DEFAULT_CHITCHAT_TEMPLATES = (
    "oh i really love talking about this topic",
    "i'm not sure but i think my cousin mentioned something like that once",
    "honestly i've always wanted to try that myself someday",
    "i'd say it's my favorite thing ever, truly amazing",
    "wow i never knew that, me and my friends should look into it",
)

_PAD_WORDS = ("really", "actually", "basically", "honestly", "definitely")


@dataclass(frozen=True)
class SimulatedGeneratorConfig:
    faithful_prob: float = 0.5
    seed: int = 0
    chitchat_templates: tuple[str, ...] = DEFAULT_CHITCHAT_TEMPLATES

    def __post_init__(self):
        if not 0.0 <= self.faithful_prob <= 1.0:
            raise ValueError("faithful_prob must be in [0, 1]")
        if not self.chitchat_templates:
            raise ValueError("chit-chat template pool must be non-empty")


class SimulatedGenerator:
    """Test double for the external LM.

    Draws a faithful response (an extractive sub-span of the evidence found
    in the serialized input, third person) with probability ``faithful_prob``,
    otherwise a first-person chit-chat template with off-evidence words.
    Deterministic given (config seed, call seed, draw index).
    """

    def __init__(self, config: SimulatedGeneratorConfig):
        self.config = config

    def sample(self, input_text: str, cfg: GenerationConfig, seed: int, draw_index: int) -> str:
        rng = random.Random(f"{self.config.seed}:{seed}:{draw_index}")
        if rng.random() < self.config.faithful_prob:
            return self._faithful(input_text, cfg, rng)
        return self._chitchat(cfg, rng)

    @staticmethod
    def _extract_evidence(input_text: str) -> str:
        _, _, rest = input_text.partition("evidence:")
        for tok in ("<speaker1>", "<speaker2>"):
            cut = rest.find(tok)
            if cut != -1:
                rest = rest[:cut]
        return rest.strip()

    def _faithful(self, input_text: str, cfg: GenerationConfig, rng: random.Random) -> str:
        words = [
            w
            for w in self._extract_evidence(input_text).split()
            if textmeasures.tokenize(w)
            and textmeasures.tokenize(w)[0] not in textmeasures.DEFAULT_FIRST_PERSON
        ]
        if not words:
            # No usable evidence in the prompt; degrade to chit-chat.
            return self._chitchat(cfg, rng)
        span_len = min(len(words), max(cfg.min_tokens, rng.randint(cfg.min_tokens, cfg.max_tokens)))
        start = rng.randint(0, len(words) - span_len)
        span = words[start : start + span_len]
        while len(span) < cfg.min_tokens:
            span.append(span[len(span) % max(1, span_len)])
        span = span[: cfg.max_tokens]
        # A span of pure function words would read as contentless; anchor it
        # with the first content-bearing evidence word so the heuristic NLI
        # judge has something to check.
        function_words = textmeasures.load_function_words()
        if not any(
            t not in function_words for w in span for t in textmeasures.tokenize(w)
        ):
            for w in words:
                if any(t not in function_words for t in textmeasures.tokenize(w)):
                    span[-1] = w
                    break
        return " ".join(span)

    def _chitchat(self, cfg: GenerationConfig, rng: random.Random) -> str:
        words = rng.choice(self.config.chitchat_templates).split()
        while len(words) < cfg.min_tokens:
            words.append(rng.choice(_PAD_WORDS))
        return " ".join(words[: cfg.max_tokens])


class RemoteGenerator:
    """Client for the /generate wire protocol."""

    def __init__(self, endpoint: str, timeout: float = 30.0, retries: int = 2):
        self.endpoint = endpoint.rstrip("/")
        self.timeout = timeout
        self.retries = retries
        self._session = requests.Session()

    def sample(self, input_text: str, cfg: GenerationConfig, seed: int, draw_index: int) -> str:
        payload = {
            "input": input_text,
            "top_p": cfg.nucleus_p,
            "min_tokens": cfg.min_tokens,
            "max_tokens": cfg.max_tokens,
            "seed": (seed * 1_000_003 + draw_index) & 0x7FFFFFFF,
        }
        last_exc: Exception | None = None
        for attempt in range(self.retries + 1):
            try:
                resp = self._session.post(
                    self.endpoint + "/generate", json=payload, timeout=self.timeout
                )
            except (requests.ConnectionError, requests.Timeout) as exc:
                last_exc = exc
                if attempt < self.retries:
                    time.sleep(min(0.5 * 2**attempt, 2.0))
                continue
            if resp.status_code != 200:
                raise ProtocolError(f"/generate returned HTTP {resp.status_code}")
            try:
                return str(resp.json()["text"])
            except (ValueError, KeyError, TypeError) as exc:
                raise ProtocolError(f"malformed /generate response: {exc}") from exc
        raise GeneratorUnavailableError(f"generator endpoint unreachable: {last_exc}")


def generate(
    input_text: str,
    cfg: GenerationConfig,
    generator: Generator,
    seed: int | None = None,
    draw_index: int = 1,
) -> str:
    """Draw one candidate from a generator backend."""
    if not input_text:
        raise ValueError("input must be non-empty")
    return generator.sample(input_text, cfg, seed if seed is not None else (cfg.seed or 0), draw_index)


def example_seed(base_seed: int, ordinal: int) -> int:
    """Independent per-example stream: base seed XOR example ordinal."""
    return base_seed ^ ordinal


def evaluate_candidate(
    text: str,
    evidence: str,
    rs_cfg: ResampleConfig,
    draw_index: int,
    lexicon: frozenset[str] | None = None,
) -> Candidate:
    """Score one candidate against the configured criteria."""
    lexicon = lexicon or textmeasures.DEFAULT_FIRST_PERSON
    toks = textmeasures.tokenize(text)
    evidence_toks = textmeasures.tokenize(evidence)
    precision = textmeasures.lexical_overlap(toks, evidence_toks).precision
    satisfied: dict[Criterion, bool] = {}
    if Criterion.OBJECTIVE_VOICE in rs_cfg.criteria:
        satisfied[Criterion.OBJECTIVE_VOICE] = textmeasures.objective_voice(toks, lexicon)
    if Criterion.HIGH_PRECISION in rs_cfg.criteria:
        satisfied[Criterion.HIGH_PRECISION] = (
            control.assign_precision_code(precision, rs_cfg.boundaries)
            is control.PrecisionCode.HIGH
        )
    if Criterion.ENTAILED in rs_cfg.criteria:
        satisfied[Criterion.ENTAILED] = entailment.judge(evidence, text, rs_cfg.judge).entailed
    return Candidate(text=text, draw_index=draw_index, satisfied=satisfied, lex_precision=precision)


def resample(
    example: corpus.GroundedExample,
    gen_cfg: GenerationConfig,
    rs_cfg: ResampleConfig,
    generator: Generator,
    seed: int | None = None,
    budget: int = 1024,
    lexicon: frozenset[str] | None = None,
) -> ResampleResult:
    """Draw until a candidate satisfies every criterion, up to max_draws.

    Sequential per example; distinct examples can run concurrently with
    independent seeds (see :func:`example_seed`).
    """
    input_text = corpus.serialize_input(example, control.decode_codes(), max_tokens=budget)
    stream_seed = seed if seed is not None else (gen_cfg.seed or 0)
    draws: list[Candidate] = []
    for draw_index in range(1, rs_cfg.max_draws + 1):
        text = generator.sample(input_text, gen_cfg, stream_seed, draw_index)
        try:
            cand = evaluate_candidate(text, example.evidence, rs_cfg, draw_index, lexicon)
        except JudgeUnavailableError as exc:
            raise ResampleAborted(f"judge unavailable at draw {draw_index}: {exc}", draws) from exc
        draws.append(cand)
        if all(cand.satisfied.values()):
            return ResampleResult(chosen=cand, draws_used=draw_index, accepted=True, fallback=False)
    best = max(draws, key=lambda c: (c.n_satisfied, c.lex_precision, -c.draw_index))
    return ResampleResult(
        chosen=best, draws_used=rs_cfg.max_draws, accepted=False, fallback=True
    )
