import random

import pytest
from hypothesis import given, strategies as st

from faithctl import _pure_kernel, textmeasures as tm
from oracles import naive_first_person, naive_overlap


class TestTokenize:
    def test_contraction_and_case(self):
        assert tm.tokenize("I'm Happy!") == ["i'm", "happy"]

    def test_empty(self):
        assert tm.tokenize("") == []

    def test_hyphen_splitting(self):
        assert tm.tokenize("co-op 2-in-1") == ["co", "op", "2", "in", "1"]

    def test_apostrophes_only_internal(self):
        assert tm.tokenize("dogs' 'em a''b can't") == ["dogs", "em", "a", "b", "can't"]

    def test_unicode_words(self):
        assert tm.tokenize("Café au lait") == ["café", "au", "lait"]

    @given(st.text(max_size=80))
    def test_idempotent_on_joined_output(self, text):
        toks = tm.tokenize(text)
        assert tm.tokenize(" ".join(toks)) == toks

    @given(st.text(max_size=120))
    def test_kernel_parity(self, text):
        # Compiled and pure kernels must agree on everything.
        assert _pure_kernel.tokenize_kernel(text) == tm._kernel.tokenize_kernel(text)


class TestObjectiveVoice:
    def test_first_person_hit(self):
        assert tm.objective_voice(["i", "love", "dogs"]) is False

    def test_objective(self):
        assert tm.objective_voice(["the", "pug", "is", "a", "breed"]) is True

    def test_me_matches(self):
        assert tm.objective_voice(["they", "told", "me", "about", "it"]) is False

    def test_order_and_duplication_invariance(self):
        toks = ["the", "dog", "my", "dog"]
        assert tm.objective_voice(toks) == tm.objective_voice(toks[::-1])
        assert tm.objective_voice(toks) == tm.objective_voice(toks * 3)

    def test_custom_lexicon(self):
        assert tm.objective_voice(["we", "went"], frozenset({"we"})) is False


class TestLexicalOverlap:
    def test_hand_example(self):
        r = tm.tokenize("the sky is blue today")
        e = tm.tokenize("the sky was blue yesterday")
        overlap = tm.lexical_overlap(r, e)
        assert overlap.precision == pytest.approx(0.6)
        assert overlap.recall == pytest.approx(0.6)

    def test_identity(self):
        toks = tm.tokenize("the pug is a breed")
        overlap = tm.lexical_overlap(toks, toks)
        assert overlap.precision == 1.0 and overlap.recall == 1.0

    def test_disjoint(self):
        overlap = tm.lexical_overlap(["aa", "bb"], ["cc", "dd"])
        assert overlap.precision == 0.0 and overlap.recall == 0.0

    def test_empty_response(self):
        assert tm.lexical_overlap([], ["x"]).precision == 0.0

    def test_empty_evidence(self):
        overlap = tm.lexical_overlap(["x"], [])
        assert overlap.precision == 0.0 and overlap.recall == 1.0

    def test_precision_recall_symmetry(self):
        r = tm.tokenize("a b b c")
        e = tm.tokenize("b c d")
        assert tm.lexical_overlap(r, e).precision == tm.lexical_overlap(e, r).recall

    def test_adding_evidence_type_never_decreases_precision(self):
        rng = random.Random(1)
        vocab = [f"w{i}" for i in range(10)]
        for _ in range(50):
            r = [rng.choice(vocab) for _ in range(rng.randint(1, 8))]
            e = [rng.choice(vocab) for _ in range(rng.randint(0, 8))]
            base = tm.lexical_overlap(r, e).precision
            extended = tm.lexical_overlap(r, e + [rng.choice(vocab)]).precision
            assert extended >= base

    def test_off_evidence_token_breaks_perfection(self):
        e = tm.tokenize("a b c")
        assert tm.lexical_overlap(["a", "b"], e).precision == 1.0
        assert tm.lexical_overlap(["a", "b", "zzz"], e).precision < 1.0

    def test_matches_naive_oracle_randomized(self):
        rng = random.Random(42)
        vocab = [f"w{i}" for i in range(12)]
        for _ in range(200):
            r = [rng.choice(vocab) for _ in range(rng.randint(0, 10))]
            e = [rng.choice(vocab) for _ in range(rng.randint(0, 10))]
            overlap = tm.lexical_overlap(r, e)
            precision, recall = naive_overlap(r, e)
            assert overlap.precision == precision
            assert overlap.recall == recall


def test_voice_matches_naive_oracle_randomized():
    rng = random.Random(7)
    vocab = ["the", "dog", "i", "my", "ran", "i'm"]
    for _ in range(100):
        toks = [rng.choice(vocab) for _ in range(rng.randint(0, 6))]
        assert tm.objective_voice(toks) == (
            not naive_first_person(toks, tm.DEFAULT_FIRST_PERSON)
        )


def test_lexicon_loader(tmp_path):
    path = tmp_path / "lex.txt"
    path.write_text("We\nOur\n\n")
    assert tm.load_lexicon(str(path)) == frozenset({"we", "our"})
    empty = tmp_path / "empty.txt"
    empty.write_text("\n")
    with pytest.raises(ValueError):
        tm.load_lexicon(str(empty))


def test_function_words_bundled():
    words = tm.load_function_words()
    assert len(words) >= 140
    assert "the" in words and "i'm" in words
