"""Corpus evaluation: character precision, sentence precision, latency.

Character precision is micro-averaged: correct and total characters are
counted over the whole corpus and divided once, so long sentences weigh more
than short ones.  Sentence precision is the fraction of samples whose entire
conversion is exact.  Latency is wall-clock time spent inside conversion
calls only (model loading excluded) divided by total tokens, in ms; being a
timing, it is the one report field that varies across runs.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, replace

from .engine import convert
from .errors import LengthMismatch, P2CError


def char_precision(hyp, ref):
    """Positionwise match count, returned as (correct, total)."""
    if len(hyp) != len(ref):
        raise LengthMismatch(
            f"hypothesis length {len(hyp)} != reference length {len(ref)}")
    correct = sum(1 for h, r in zip(hyp, ref) if h == r)
    return correct, len(ref)


def sentence_exact(hyp, ref):
    if len(hyp) != len(ref):
        raise LengthMismatch(
            f"hypothesis length {len(hyp)} != reference length {len(ref)}")
    return all(h == r for h, r in zip(hyp, ref))


@dataclass(frozen=True)
class EvalReport:
    char_precision: float
    sentence_precision: float
    ms_per_token: float
    sequences: int
    tokens: int
    correct_tokens: int
    correct_sequences: int
    skipped: int
    empty: bool
    engine_desc: str

    # Timing fields vary run to run; everything else is deterministic.
    TIMING_KEYS = ("ms_per_token",)

    def kv_lines(self):
        pairs = [
            ("char_precision", f"{self.char_precision:.6f}"),
            ("sentence_precision", f"{self.sentence_precision:.6f}"),
            ("ms_per_token", f"{self.ms_per_token:.3f}"),
            ("sequences", str(self.sequences)),
            ("tokens", str(self.tokens)),
            ("correct_tokens", str(self.correct_tokens)),
            ("correct_sequences", str(self.correct_sequences)),
            ("skipped", str(self.skipped)),
            ("empty", "true" if self.empty else "false"),
            ("engine", self.engine_desc),
        ]
        return [f"{k}\t{v}" for k, v in pairs]

    def table(self):
        """Aligned summary using the conventional metric column names."""
        headers = ("Model", "Char_Precision", "Sen_Precision", "ms/token")
        row = (self.engine_desc, f"{self.char_precision:.4f}",
               f"{self.sentence_precision:.4f}", f"{self.ms_per_token:.3f}")
        widths = [max(len(h), len(r)) for h, r in zip(headers, row)]
        fmt = "  ".join(f"{{:<{w}}}" for w in widths)
        return fmt.format(*headers) + "\n" + fmt.format(*row)


def evaluate(samples, engine, mode=None):
    """Decode top-1 for every (pinyin, chars) sample and aggregate.

    ``samples`` is any iterable of parsed corpus pairs.  A sample that raises
    a conversion error is skipped and counted, never silently dropped.
    """
    described = engine if mode is None else replace(
        engine, score=replace(engine.score, mode=mode))
    sequences = tokens = correct_tokens = correct_sequences = skipped = 0
    decode_seconds = 0.0
    for pinyin, chars in samples:
        try:
            t0 = time.perf_counter()
            best = convert(pinyin, engine, k=1, mode=mode)[0]
            decode_seconds += time.perf_counter() - t0
        except P2CError:
            skipped += 1
            continue
        correct, total = char_precision(best.surface, chars)
        sequences += 1
        tokens += total
        correct_tokens += correct
        if correct == total:
            correct_sequences += 1
    empty = tokens == 0
    return EvalReport(
        char_precision=0.0 if empty else correct_tokens / tokens,
        sentence_precision=0.0 if sequences == 0
        else correct_sequences / sequences,
        ms_per_token=0.0 if empty else decode_seconds * 1000.0 / tokens,
        sequences=sequences,
        tokens=tokens,
        correct_tokens=correct_tokens,
        correct_sequences=correct_sequences,
        skipped=skipped,
        empty=empty,
        engine_desc=described.describe(),
    )


def write_report(report, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in report.kv_lines():
            fh.write(line + "\n")
