"""Evaluation metrics and report rendering."""

import pytest

from helpers import TablePert, figure1_table, random_pinyin
from p2c.decoder import EMISSION_ONLY, ScoreConfig
from p2c.engine import Engine, convert
from p2c.errors import LengthMismatch, SequenceTooLong
from p2c.evaluation import (EvalReport, char_precision, evaluate,
                            sentence_exact, write_report)

import numpy as np


def emission_engine(demo_dict, table, **kw):
    return Engine(char_dict=demo_dict, pert=TablePert(demo_dict, table),
                  score=ScoreConfig(mode=EMISSION_ONLY), **kw)


def skewed_table():
    """First sample decodes exactly; the second gets only its last char."""
    return {
        "wo": {"我": 0.9}, "men": {"们": 0.9}, "qu": {"去": 0.9},
        "yong": {"用": 0.6, "雍": 0.3},
        "he": {"河": 0.6, "和": 0.3},
        "gong": {"宫": 0.6, "公": 0.3},
    }


TWO_SAMPLES = [
    (("wo", "men", "qu"), "我们去"),
    (("yong", "he", "gong"), "雍和宫"),
]


class TestCounts:
    def test_char_precision_counts(self):
        assert char_precision("我们去", "我们去") == (3, 3)
        assert char_precision("我门去", "我们去") == (2, 3)
        assert char_precision("", "") == (0, 0)

    def test_char_precision_length_guard(self):
        with pytest.raises(LengthMismatch):
            char_precision("我们", "我们去")

    def test_sentence_exact(self):
        assert sentence_exact("我们去", "我们去")
        assert not sentence_exact("我门去", "我们去")
        with pytest.raises(LengthMismatch):
            sentence_exact("我", "我们")


class TestEvaluate:
    def test_two_sample_fixture(self, demo_dict):
        engine = emission_engine(demo_dict, skewed_table())
        report = evaluate(TWO_SAMPLES, engine)
        assert (report.correct_tokens, report.tokens) == (4, 6)
        assert (report.correct_sequences, report.sequences) == (1, 2)
        assert report.char_precision == pytest.approx(4 / 6, abs=1e-12)
        assert report.sentence_precision == pytest.approx(0.5, abs=1e-12)
        assert report.skipped == 0
        assert not report.empty
        assert report.ms_per_token >= 0.0

    def test_perfect_engine_scores_one(self, demo_dict):
        engine = emission_engine(demo_dict, skewed_table())
        refs = [(p, convert(p, engine, k=1)[0].surface)
                for p, _ in TWO_SAMPLES]
        report = evaluate(refs, engine)
        assert report.char_precision == 1.0
        assert report.sentence_precision == 1.0

    def test_micro_average_recomputation(self, demo_dict, demo_lexicon):
        rng = np.random.default_rng(71)
        engine = emission_engine(demo_dict, figure1_table(),
                                 lexicons=(demo_lexicon,))
        for _ in range(10):
            samples = []
            for _ in range(int(rng.integers(1, 8))):
                pinyin = random_pinyin(rng, demo_dict,
                                       n=int(rng.integers(1, 6)))
                ref = "".join(
                    demo_dict.candidates(s)[
                        int(rng.integers(len(demo_dict.candidates(s))))]
                    for s in pinyin)
                samples.append((pinyin, ref))
            report = evaluate(samples, engine)
            correct = total = exact = 0
            for pinyin, ref in samples:
                hyp = convert(pinyin, engine, k=1)[0].surface
                c, t = char_precision(hyp, ref)
                correct, total = correct + c, total + t
                exact += hyp == ref
            assert report.char_precision == correct / total
            assert report.sentence_precision == exact / len(samples)
            assert report.tokens == total

    def test_failing_samples_are_skipped_and_counted(self, demo_dict):
        class Capped:
            def __init__(self, inner):
                self.inner = inner

            def emission(self, pinyin):
                if len(pinyin) > 3:
                    raise SequenceTooLong("capped at 3 for the test")
                return self.inner.emission(pinyin)

        engine = Engine(char_dict=demo_dict,
                        pert=Capped(TablePert(demo_dict, skewed_table())),
                        score=ScoreConfig(mode=EMISSION_ONLY))
        long_sample = (("wo", "men", "qu", "gong"), "我们去宫")
        report = evaluate(TWO_SAMPLES + [long_sample], engine)
        assert report.skipped == 1
        assert report.sequences == 2
        assert report.tokens == 6

    def test_corrupt_reference_fails_loudly(self, demo_dict):
        engine = emission_engine(demo_dict, skewed_table())
        with pytest.raises(LengthMismatch):
            evaluate([(("wo", "men"), "我们去")], engine)

    def test_empty_corpus(self, demo_dict):
        engine = emission_engine(demo_dict, skewed_table())
        report = evaluate([], engine)
        assert report.empty
        assert report.char_precision == 0.0
        assert report.ms_per_token == 0.0
        assert "empty\ttrue" in report.kv_lines()

    def test_mode_override_changes_description(self, demo_dict):
        engine = emission_engine(demo_dict, skewed_table())
        report = evaluate(TWO_SAMPLES, engine, mode="emission")
        assert "mode=emission" in report.engine_desc


class TestReport:
    def make(self, demo_dict):
        engine = emission_engine(demo_dict, skewed_table())
        return evaluate(TWO_SAMPLES, engine)

    def test_kv_lines_shape(self, demo_dict):
        lines = self.make(demo_dict).kv_lines()
        keys = [line.split("\t")[0] for line in lines]
        assert keys == ["char_precision", "sentence_precision",
                        "ms_per_token", "sequences", "tokens",
                        "correct_tokens", "correct_sequences", "skipped",
                        "empty", "engine"]
        assert "char_precision\t0.666667" in lines
        assert "sentence_precision\t0.500000" in lines

    def test_table_columns(self, demo_dict):
        table = self.make(demo_dict).table()
        header, row = table.splitlines()
        for column in ("Model", "Char_Precision", "Sen_Precision",
                       "ms/token"):
            assert column in header
        assert "0.6667" in row and "0.5000" in row

    def test_timing_is_the_only_varying_field(self, demo_dict):
        a = self.make(demo_dict)
        b = self.make(demo_dict)
        strip = EvalReport.TIMING_KEYS

        def stable(report):
            return [line for line in report.kv_lines()
                    if line.split("\t")[0] not in strip]

        assert stable(a) == stable(b)

    def test_write_report(self, demo_dict, tmp_path):
        report = self.make(demo_dict)
        out = tmp_path / "report.tsv"
        write_report(report, out)
        assert out.read_text(encoding="utf-8").splitlines() \
            == report.kv_lines()
