"""Bigram transition model over character ids.

Counts come straight off the character side of a parallel corpus; probabilities
are interpolated on demand:

    P(next | prev) = lambda * count(prev,next)/count(prev,.)
                   + (1 - lambda) * (count(next) + 1) / (total + V)

where V counts the smoothing support: every non-pad character plus eos.  A
context with no outgoing counts backs off to the add-one unigram term at full
weight, so every context row sums to exactly 1 and an empty model degenerates
to the uniform distribution.  Pad is never a legal successor and gets
probability zero.

Serialized form (NGRM1, little-endian throughout):

    magic        5 bytes   b"NGRM1"
    checksum    32 bytes   sha256 of the char vocab, raw digest
    lambda       8 bytes   float64
    n_bigrams    8 bytes   uint64
    bigrams     16n bytes  (prev uint32, next uint32, count uint64), sorted
    n_unigrams   8 bytes   uint64
    unigrams    12n bytes  (id uint32, count uint64), sorted

Counts are exact integers so a save/load round trip is lossless and lambda can
be retuned without recounting.
"""

from __future__ import annotations

import struct

from .corpus import read_parallel_corpus
from .errors import ChecksumMismatch, FormatError, VocabMismatch
from .lexicon import PAD_ID

MAGIC = b"NGRM1"
DEFAULT_LAMBDA = 0.9


class NgramModel:
    """Immutable after construction; safe to share across decoder threads."""

    def __init__(self, unigram_counts, bigram_counts, vocab_size, vocab_checksum,
                 lam=DEFAULT_LAMBDA):
        if not 0.0 <= lam <= 1.0:
            raise ValueError(f"lambda must lie in [0, 1], got {lam}")
        self.unigram_counts = dict(unigram_counts)
        self.bigram_counts = dict(bigram_counts)
        self.vocab_size = vocab_size          # len(char_vocab); also |support|
        self.vocab_checksum = vocab_checksum  # hex digest of the char vocab
        self.lam = lam
        self.bos = vocab_size
        self.eos = vocab_size + 1
        self.total_tokens = sum(self.unigram_counts.values())
        # Row sums give the ML denominator per context.
        self._context_totals = {}
        for (prev, _), n in self.bigram_counts.items():
            self._context_totals[prev] = self._context_totals.get(prev, 0) + n

    def prob(self, prev, next_id):
        if next_id == PAD_ID:
            return 0.0
        unigram = (self.unigram_counts.get(next_id, 0) + 1) / (
            self.total_tokens + self.vocab_size)
        row = self._context_totals.get(prev, 0)
        if row == 0:
            return unigram
        ml = self.bigram_counts.get((prev, next_id), 0) / row
        return self.lam * ml + (1.0 - self.lam) * unigram

    def support(self):
        """Ids that may carry probability mass as a successor."""
        return [i for i in range(self.vocab_size) if i != PAD_ID] + [self.eos]

    def __eq__(self, other):
        if not isinstance(other, NgramModel):
            return NotImplemented
        return (self.unigram_counts == other.unigram_counts
                and self.bigram_counts == other.bigram_counts
                and self.vocab_size == other.vocab_size
                and self.vocab_checksum == other.vocab_checksum
                and self.lam == other.lam)


def train_bigram(corpus_path, char_dict, lam=DEFAULT_LAMBDA):
    """Count bos c1 .. cn eos per sample; the pinyin side is ignored."""
    vocab_size = char_dict.num_chars
    bos = vocab_size
    eos = vocab_size + 1
    unigrams = {}
    bigrams = {}
    for _, chars in read_parallel_corpus(corpus_path):
        prev = bos
        for ch in chars:
            if ch not in char_dict.char_ids:
                raise VocabMismatch(f"character {ch!r} not in dictionary")
            cid = char_dict.char_ids[ch]
            unigrams[cid] = unigrams.get(cid, 0) + 1
            bigrams[(prev, cid)] = bigrams.get((prev, cid), 0) + 1
            prev = cid
        bigrams[(prev, eos)] = bigrams.get((prev, eos), 0) + 1
    return NgramModel(unigrams, bigrams, vocab_size,
                      char_dict.char_checksum(), lam)


def save(model, path):
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(bytes.fromhex(model.vocab_checksum))
        fh.write(struct.pack("<d", model.lam))
        fh.write(struct.pack("<Q", len(model.bigram_counts)))
        for (prev, nxt), n in sorted(model.bigram_counts.items()):
            fh.write(struct.pack("<IIQ", prev, nxt, n))
        fh.write(struct.pack("<Q", len(model.unigram_counts)))
        for cid, n in sorted(model.unigram_counts.items()):
            fh.write(struct.pack("<IQ", cid, n))


def load(path, char_dict):
    with open(path, "rb") as fh:
        data = fh.read()
    view = memoryview(data)
    pos = 0

    def take(n, what):
        nonlocal pos
        if pos + n > len(view):
            raise FormatError(f"truncated bigram file: expected {what}")
        out = view[pos:pos + n]
        pos += n
        return out

    if bytes(take(len(MAGIC), "magic")) != MAGIC:
        raise FormatError("not a NGRM1 file")
    checksum = bytes(take(32, "vocab checksum")).hex()
    if checksum != char_dict.char_checksum():
        raise ChecksumMismatch(
            "bigram model was trained against a different character dictionary")
    (lam,) = struct.unpack("<d", take(8, "lambda"))
    (n_bi,) = struct.unpack("<Q", take(8, "bigram count"))
    bigrams = {}
    for _ in range(n_bi):
        prev, nxt, n = struct.unpack("<IIQ", take(16, "bigram triple"))
        bigrams[(prev, nxt)] = n
    (n_uni,) = struct.unpack("<Q", take(8, "unigram count"))
    unigrams = {}
    for _ in range(n_uni):
        cid, n = struct.unpack("<IQ", take(12, "unigram pair"))
        unigrams[cid] = n
    if pos != len(view):
        raise FormatError(f"{len(view) - pos} trailing bytes after unigram table")
    return NgramModel(unigrams, bigrams, char_dict.num_chars, checksum, lam)
