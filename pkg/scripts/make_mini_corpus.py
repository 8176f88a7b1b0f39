#!/usr/bin/env python3
"""Regenerate the bundled 200-example mini-corpus (deterministic, seed 7).

The corpus mixes extractive, partially grounded, and first-person chit-chat
responses so that every pipeline stage (stats, terciles, augment, filter,
resample) has non-degenerate inputs. Output is canonical JSONL at
src/faithctl/data/mini_corpus.jsonl.
"""

import random
from pathlib import Path

from faithctl import corpus

TOPICS = {
    "pugs": "the pug is a small breed of dog with a wrinkly face and curled tail originating from china".split(),
    "jazz": "jazz is a music genre that developed in new orleans with roots in blues and ragtime improvisation".split(),
    "volcanoes": "a volcano is a rupture in the crust of a planet that allows lava ash and gases to escape".split(),
    "cycling": "cycling is the use of bicycles for transport recreation exercise or sport and is widely practiced".split(),
    "coffee": "coffee is a brewed drink prepared from roasted beans of certain flowering plants native to africa".split(),
    "glaciers": "a glacier is a persistent body of dense ice that moves slowly under its own weight over centuries".split(),
    "chess": "chess is a board game for two players played on a checkered board with sixty four squares".split(),
    "honey": "honey is a sweet viscous substance made by bees through regurgitation and evaporation of nectar".split(),
}

OFF_EVIDENCE = (
    "amazing weekend stories friends wonderful awesome cousin favorite garden "
    "holiday yesterday maybe certainly museum train painting laughter dinner"
).split()

APPRENTICE_OPENERS = (
    "do you know much about {topic}?",
    "i have always wondered about {topic}, can you tell me more?",
    "what can you share about {topic}?",
    "is there anything interesting about {topic}?",
)

APPRENTICE_FOLLOWUPS = (
    "that is interesting, what else?",
    "really? tell me more please.",
    "i did not know that, anything else?",
    "how does that work exactly?",
)

WIZARD_FILLERS = (
    "there is a lot to say about this subject.",
    "it has quite a long history actually.",
    "many people find this topic fascinating.",
)

FIRST_PERSON_LEADS = (
    "i think", "i'm pretty sure", "i've heard that", "my friend says", "i'd guess",
)


def build_response(rng, evidence_words):
    """Pick a style; return (text, wants_first_person)."""
    style = rng.random()
    span_len = rng.randint(5, min(12, len(evidence_words)))
    start = rng.randint(0, len(evidence_words) - span_len)
    span = list(evidence_words[start : start + span_len])
    if style < 0.30:
        # Extractive, objective.
        return " ".join(span), False
    if style < 0.55:
        # Partially grounded, objective: dilute with off-evidence words.
        k = rng.randint(2, 6)
        for _ in range(k):
            span.insert(rng.randint(0, len(span)), rng.choice(OFF_EVIDENCE))
        return " ".join(span), False
    if style < 0.80:
        # First-person framing around grounded content.
        lead = rng.choice(FIRST_PERSON_LEADS)
        return f"{lead} {' '.join(span)}", True
    # Pure chit-chat, first person, off-evidence.
    words = [rng.choice(FIRST_PERSON_LEADS)]
    words += rng.sample(OFF_EVIDENCE, rng.randint(4, 8))
    return " ".join(words), True


def main():
    rng = random.Random(7)
    examples = []
    topics = sorted(TOPICS)
    for i in range(200):
        topic = topics[i % len(topics)]
        evidence_words = TOPICS[topic]
        evidence = " ".join(evidence_words) + "."
        turns = [corpus.Turn(corpus.Speaker.APPRENTICE,
                             rng.choice(APPRENTICE_OPENERS).format(topic=topic))]
        for _ in range(rng.randint(0, 1)):
            turns.append(corpus.Turn(corpus.Speaker.WIZARD, rng.choice(WIZARD_FILLERS)))
            turns.append(corpus.Turn(corpus.Speaker.APPRENTICE, rng.choice(APPRENTICE_FOLLOWUPS)))
        response, _ = build_response(rng, evidence_words)
        examples.append(
            corpus.GroundedExample(
                id=f"mini-{i:03d}",
                topic=topic,
                split=corpus.Split.TRAIN,
                history=tuple(turns),
                evidence=evidence,
                response=response,
            )
        )
    out = Path(__file__).resolve().parent.parent / "src" / "faithctl" / "data" / "mini_corpus.jsonl"
    with open(out, "w", encoding="utf-8") as fh:
        corpus.emit(examples, fh)
    print(f"wrote {len(examples)} examples -> {out}")


if __name__ == "__main__":
    main()
