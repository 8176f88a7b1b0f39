import io
from importlib import resources

import pytest

from faithctl import corpus, entailment


@pytest.fixture(scope="session")
def mini_corpus():
    text = resources.files("faithctl.data").joinpath("mini_corpus.jsonl").read_text("utf-8")
    return corpus.ingest(io.StringIO(text))


@pytest.fixture(scope="session")
def mini_corpus_path(tmp_path_factory, mini_corpus):
    path = tmp_path_factory.mktemp("data") / "mini_corpus.jsonl"
    with open(path, "w", encoding="utf-8") as fh:
        corpus.emit(mini_corpus, fh)
    return path


@pytest.fixture
def heuristic_judge():
    return entailment.JudgeConfig()


def make_example(
    history=None,
    evidence="the pug is a small breed of dog",
    response="the pug is a small breed",
    split=corpus.Split.TRAIN,
    id="ex-1",
    topic="pugs",
):
    if history is None:
        history = (corpus.Turn(corpus.Speaker.APPRENTICE, "tell me about pugs"),)
    return corpus.GroundedExample(
        id=id, topic=topic, split=split, history=tuple(history),
        evidence=evidence, response=response,
    )
