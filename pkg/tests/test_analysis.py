import io
import random

import pytest

from faithctl import analysis as an
from faithctl.entailment import Backend, JudgeConfig
from faithctl.errors import IngestError

HEURISTIC = JudgeConfig()


class TestBleu4:
    def test_identity(self):
        corpus = [["the", "cat", "sat", "on", "the", "mat"], ["a", "b", "c", "d"]]
        assert an.bleu4(corpus, corpus) == pytest.approx(1.0)

    def test_hand_example(self):
        cand = "the north wind and the sun were disputing".split()
        ref = "the north wind and the sun had disputed".split()
        expected = (6 / 8 * 5 / 7 * 4 / 6 * 3 / 5) ** 0.25
        assert an.bleu4([cand], [ref]) == pytest.approx(expected, abs=1e-9)
        assert an.bleu4([cand], [ref]) == pytest.approx(0.680, abs=1e-3)

    def test_zero_fourgram_precision(self):
        cand = "the cat sat on the mat".split()
        ref = "the cat is on the mat".split()
        assert an.bleu4([cand], [ref]) == 0.0

    def test_brevity_penalty(self):
        # Perfect prefix, candidate shorter than reference.
        cand = "a b c d e".split()
        ref = "a b c d e f g".split()
        import math

        expected_bp = math.exp(1 - 7 / 5)
        score = an.bleu4([cand], [ref])
        precisions = (5 / 5) * (4 / 4) * (3 / 3) * (2 / 2)
        assert score == pytest.approx(expected_bp * precisions**0.25)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            an.bleu4([["a"]], [])

    def test_matches_oracle_randomized(self):
        from oracles import naive_bleu4

        rng = random.Random(13)
        vocab = [f"w{i}" for i in range(8)]
        for _ in range(20):
            n = rng.randint(1, 4)
            cands = [[rng.choice(vocab) for _ in range(rng.randint(4, 12))] for _ in range(n)]
            refs = [[rng.choice(vocab) for _ in range(rng.randint(4, 12))] for _ in range(n)]
            assert an.bleu4(cands, refs) == pytest.approx(naive_bleu4(cands, refs), abs=1e-9)

    def test_relabeling_invariance(self):
        cand = "a b a c".split()
        ref = "a b c c".split()
        mapping = {"a": "x", "b": "y", "c": "z"}
        cand2 = [mapping[t] for t in cand]
        ref2 = [mapping[t] for t in ref]
        assert an.bleu4([cand], [ref]) == pytest.approx(an.bleu4([cand2], [ref2]))


class TestPearson:
    def test_perfect_linear(self):
        assert an.pearson([1, 2, 3], [2, 4, 6]) == pytest.approx(1.0)

    def test_hand_example(self):
        assert an.pearson([1, 2, 3, 4], [1, 3, 2, 4]) == pytest.approx(0.8, abs=1e-12)

    def test_anticorrelation(self):
        assert an.pearson([1, 2, 3], [3, 2, 1]) == pytest.approx(-1.0)

    def test_symmetry_and_affine_invariance(self):
        x = [1.0, 2.5, 3.0, 5.0]
        y = [2.0, 1.0, 4.0, 3.0]
        r = an.pearson(x, y)
        assert an.pearson(y, x) == pytest.approx(r)
        assert an.pearson([3 * a + 7 for a in x], y) == pytest.approx(r)
        assert an.pearson([-a for a in x], y) == pytest.approx(-r)

    def test_zero_variance_errors(self):
        with pytest.raises(ValueError):
            an.pearson([1, 1, 1], [1, 2, 3])

    def test_length_checks(self):
        with pytest.raises(ValueError):
            an.pearson([1], [1])
        with pytest.raises(ValueError):
            an.pearson([1, 2], [1, 2, 3])


class TestKrippendorffAlpha:
    def test_perfect_agreement(self):
        assert an.interval_alpha([[3, 3], [5, 5], [1, 1]]) == pytest.approx(1.0)

    def test_hand_case(self):
        assert an.interval_alpha([[1, 2], [1, 2]]) == pytest.approx(-0.5, abs=1e-12)

    def test_no_pairable_values(self):
        with pytest.raises(ValueError):
            an.interval_alpha([[1], [2]])

    def test_single_rating_units_ignored(self):
        base = an.interval_alpha([[1, 2], [1, 2]])
        with_single = an.interval_alpha([[1, 2], [1, 2], [4]])
        assert with_single == pytest.approx(base)

    def test_permutation_invariance(self):
        units = [[1, 2], [3, 4], [2, 5, 3]]
        a1 = an.interval_alpha(units)
        a2 = an.interval_alpha([list(reversed(u)) for u in reversed(units)])
        assert a2 == pytest.approx(a1)


RATINGS_CSV = """item_id,rater_id,fluency,relevance,faithfulness,objectivity
i1,r1,5,4,5,5
i1,r2,5,4,5,5
i2,r1,4,5,1,1
i2,r2,4,5,1,2
i3,r1,5,3,3,3
i3,r2,5,3,3,
"""


class TestRatingsMatrix:
    def test_from_csv(self):
        m = an.RatingsMatrix.from_csv(io.StringIO(RATINGS_CSV))
        assert m.n_raters == 2
        assert m.items("fluency") == ["i1", "i2", "i3"]
        # Blank objectivity cell for (i3, r2) is missing.
        assert m.item_values("objectivity") == [[5, 5], [1, 2], [3]]

    def test_rejects_out_of_scale(self):
        m = an.RatingsMatrix()
        with pytest.raises(ValueError):
            m.add("i", "r", "fluency", 6)

    def test_missing_columns(self):
        with pytest.raises(IngestError):
            an.RatingsMatrix.from_csv(io.StringIO("item_id,rater_id\na,b\n"))

    def test_alpha_per_quality(self):
        m = an.RatingsMatrix.from_csv(io.StringIO(RATINGS_CSV))
        assert an.krippendorff_alpha(m, "fluency") == pytest.approx(1.0)
        assert an.krippendorff_alpha(m, "faithfulness") == pytest.approx(1.0)


class TestCorrelate:
    def test_constructed_linearity(self):
        m = an.RatingsMatrix.from_csv(io.StringIO(RATINGS_CSV))
        measures = {
            # objectivity means: i1=5.0, i2=1.5, i3=3.0
            "i1": {"no_first_person": 1.0, "lex_precision": 0.9, "lex_recall": 0.5, "entailed": 1.0},
            "i2": {"no_first_person": 0.3, "lex_precision": 0.2, "lex_recall": 0.1, "entailed": 0.0},
            "i3": {"no_first_person": 0.6, "lex_precision": 0.5, "lex_recall": 0.3, "entailed": 0.0},
        }
        table = an.correlate(m, measures)
        cell = table[("no_first_person", "objectivity")]
        assert cell.r == pytest.approx(1.0)
        assert cell.n == 3

    def test_zero_variance_surfaces_per_cell(self):
        m = an.RatingsMatrix.from_csv(io.StringIO(RATINGS_CSV))
        measures = {
            i: {"no_first_person": 1.0, "lex_precision": 0.5, "lex_recall": 0.5, "entailed": 1.0}
            for i in ("i1", "i2", "i3")
        }
        table = an.correlate(m, measures)
        cell = table[("no_first_person", "objectivity")]
        assert cell.r is None and cell.error is not None

    def test_missing_items_dropped_pairwise(self):
        m = an.RatingsMatrix.from_csv(io.StringIO(RATINGS_CSV))
        measures = {
            "i1": {"no_first_person": 1.0, "lex_precision": 0.9, "lex_recall": 0.5, "entailed": 1.0},
            "i2": {"no_first_person": 0.0, "lex_precision": 0.2, "lex_recall": 0.1, "entailed": 0.0},
        }
        table = an.correlate(m, measures)
        assert table[("lex_precision", "faithfulness")].n == 2


class TestEvaluate:
    def rows(self):
        ev = "the pug is a small breed of dog"
        return [
            an.EvalRow(id="1", system_response=ev, reference_response=ev, evidence=ev),
            an.EvalRow(id="2", system_response=ev, reference_response=ev, evidence=ev),
        ]

    def test_identity_rows(self):
        report = an.evaluate(self.rows(), HEURISTIC)
        assert report.bleu4 == pytest.approx(1.0)
        assert report.mean_lex_precision == 1.0
        assert report.mean_lex_recall == 1.0
        assert report.pct_no_first_person == 1.0
        assert report.pct_entailed == 1.0

    def test_disjoint_row(self):
        row = an.EvalRow(
            id="1",
            system_response="zebra quantum xylophone",
            reference_response="zebra quantum xylophone",
            evidence="the pug is a small breed",
        )
        report = an.evaluate([row], HEURISTIC)
        assert report.mean_lex_precision == 0.0
        assert report.mean_lex_recall == 0.0

    def test_empty_rows_error(self):
        with pytest.raises(ValueError):
            an.evaluate([], HEURISTIC)

    def test_empty_response_scored_not_rejected(self):
        row = an.EvalRow(
            id="1", system_response="", reference_response="a b", evidence="a b c"
        )
        report = an.evaluate([row], HEURISTIC)
        assert report.bleu4 == 0.0
        assert report.mean_lex_precision == 0.0

    def test_judge_unavailable_marks_entailment_absent(self):
        cfg = JudgeConfig(
            backend=Backend.REMOTE, endpoint="http://127.0.0.1:1", timeout=0.2, retries=0
        )
        report = an.evaluate(self.rows(), cfg)
        assert report.pct_entailed is None
        assert report.bleu4 == pytest.approx(1.0)

    def test_cross_module_consistency(self, mini_corpus, heuristic_judge):
        from faithctl.measures import measure_example

        rows = [
            an.EvalRow(
                id=ex.id,
                system_response=ex.response,
                reference_response=ex.response,
                evidence=ex.evidence,
            )
            for ex in mini_corpus[:25]
        ]
        report = an.evaluate(rows, heuristic_judge)
        reports = [measure_example(ex, heuristic_judge) for ex in mini_corpus[:25]]
        assert report.mean_lex_precision == pytest.approx(
            sum(r.lex_precision for r in reports) / 25
        )
        assert report.pct_entailed == pytest.approx(
            sum(r.entailed for r in reports) / 25
        )

    def test_table_rendering(self):
        report = an.evaluate(self.rows(), HEURISTIC)
        table = report.to_table()
        assert "B4" in table and "NLI%" in table
