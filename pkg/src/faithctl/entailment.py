"""Entailment judge: a lexical-coverage heuristic and a remote NLI client.

The heuristic is a deterministic desk-scale proxy, not a reimplementation of
an MNLI model: it calls a hypothesis entailed when enough of its content
tokens are covered by the premise. The remote backend speaks the /nli wire
protocol and maps the three-way label down to a binary verdict (neutral and
contradiction both count as non-entailing).
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum

import requests

from faithctl import textmeasures
from faithctl.errors import JudgeUnavailableError, ProtocolError


# Failed slots in judge_batch results hold the raised exception.
FaithfulnessJudgeError = Exception


class NliLabel(Enum):
    ENTAILMENT = "entailment"
    NEUTRAL = "neutral"
    CONTRADICTION = "contradiction"


@dataclass(frozen=True)
class EntailmentVerdict:
    entailed: bool
    raw_label: NliLabel | None = None
    score: float | None = None

    def __post_init__(self):
        if self.raw_label is not None and self.entailed != (
            self.raw_label is NliLabel.ENTAILMENT
        ):
            raise ValueError("entailed flag inconsistent with raw label")


class Backend(Enum):
    HEURISTIC = "heuristic"
    REMOTE = "remote"


@dataclass(frozen=True)
class JudgeConfig:
    backend: Backend = Backend.HEURISTIC
    theta: float = 0.8
    endpoint: str | None = None
    timeout: float = 10.0
    max_in_flight: int = 4
    retries: int = 2

    def __post_init__(self):
        if not 0.0 <= self.theta <= 1.0:
            raise ValueError("theta must be in [0, 1]")
        if self.backend is Backend.REMOTE and not self.endpoint:
            raise ValueError("remote judge requires an endpoint")


_FUNCTION_WORDS = textmeasures.load_function_words()


def _judge_heuristic(premise: str, hypothesis: str, theta: float) -> EntailmentVerdict:
    content = [t for t in textmeasures.tokenize(hypothesis) if t not in _FUNCTION_WORDS]
    if not content:
        return EntailmentVerdict(entailed=False, score=0.0)
    premise_types = set(textmeasures.tokenize(premise))
    coverage = sum(1 for t in content if t in premise_types) / len(content)
    return EntailmentVerdict(entailed=coverage >= theta, score=coverage)


def _judge_remote(premise: str, hypothesis: str, config: JudgeConfig) -> EntailmentVerdict:
    url = config.endpoint.rstrip("/") + "/nli"
    payload = {"premise": premise, "hypothesis": hypothesis}
    last_exc: Exception | None = None
    for attempt in range(config.retries + 1):
        try:
            resp = requests.post(url, json=payload, timeout=config.timeout)
        except (requests.ConnectionError, requests.Timeout) as exc:
            last_exc = exc
            if attempt < config.retries:
                time.sleep(min(0.5 * 2**attempt, 2.0))
            continue
        if resp.status_code != 200:
            raise ProtocolError(f"/nli returned HTTP {resp.status_code}")
        try:
            body = resp.json()
            label = NliLabel(body["label"])
            score = float(body["probs"][label.value])
        except (ValueError, KeyError, TypeError) as exc:
            raise ProtocolError(f"malformed /nli response: {exc}") from exc
        return EntailmentVerdict(
            entailed=label is NliLabel.ENTAILMENT, raw_label=label, score=score
        )
    raise JudgeUnavailableError(f"NLI endpoint unreachable: {last_exc}")


def judge(premise: str, hypothesis: str, config: JudgeConfig) -> EntailmentVerdict:
    """Decide whether the premise (evidence) entails the hypothesis (response)."""
    if config.backend is Backend.HEURISTIC:
        return _judge_heuristic(premise, hypothesis, config.theta)
    return _judge_remote(premise, hypothesis, config)


def judge_batch(
    pairs: list[tuple[str, str]], config: JudgeConfig
) -> list[EntailmentVerdict | FaithfulnessJudgeError]:
    """Element-wise judge over pairs, order-preserving.

    Remote calls are pipelined up to ``max_in_flight``. A failed element is
    reported in its slot as the exception; other elements are unaffected.
    """
    if config.backend is Backend.HEURISTIC or len(pairs) <= 1:
        results: list[EntailmentVerdict | FaithfulnessJudgeError] = []
        for premise, hypothesis in pairs:
            try:
                results.append(judge(premise, hypothesis, config))
            except (JudgeUnavailableError, ProtocolError) as exc:
                results.append(exc)
        return results
    with ThreadPoolExecutor(max_workers=config.max_in_flight) as pool:
        futures = [pool.submit(judge, p, h, config) for p, h in pairs]
        out: list[EntailmentVerdict | FaithfulnessJudgeError] = []
        for fut in futures:
            try:
                out.append(fut.result())
            except (JudgeUnavailableError, ProtocolError) as exc:
                out.append(exc)
        return out
