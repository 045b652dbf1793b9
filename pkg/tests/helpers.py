"""Shared fixtures and generators for the test suite."""

from pathlib import Path

import numpy as np

from p2c.decoder import ScoreConfig
from p2c.lattice import build_lattice, inject_words
from p2c.lexicon import LexEntry, WordLexicon
from p2c.ngram import NgramModel
from p2c.pert import EmissionMatrix, PertConfig, tensor_table

DATA = Path(__file__).parent / "data"


# --- hand-set encoder fixture -------------------------------------------

def rat(i):
    """Small exact rational in [-1/8, 1/8]: (((37 i + 11) mod 17) - 8) / 64."""
    return (((i * 37 + 11) % 17) - 8) / 64.0


def handset_config():
    return PertConfig(num_layers=1, hidden_size=4, num_heads=1,
                      pinyin_vocab_size=3, char_vocab_size=3, ff_size=16,
                      max_len=4)


def handset_weights(config=None):
    """Deterministic rational weights, exactly representable in float32.

    Tensor elements take rat() over a running counter in canonical tensor
    order; layernorm parameters are recentred to gamma near 1, beta near 0.
    """
    config = config or handset_config()
    weights = {}
    counter = 0
    for name, shape in tensor_table(config):
        size = int(np.prod(shape))
        vals = np.array([rat(counter + j) for j in range(size)])
        counter += size
        if name.endswith("layernorm.gamma"):
            vals = 1.0 + vals / 4.0
        elif name.endswith("layernorm.beta"):
            vals = vals / 4.0
        weights[name] = vals.astype(np.float32).reshape(shape)
    return weights


def weights_as_lists(weights):
    return {name: arr.astype(np.float64).tolist()
            for name, arr in weights.items()}


def random_weights(config, seed, scale=0.05):
    """Gaussian weights with layernorm gains near 1; deterministic per seed."""
    rng = np.random.default_rng(seed)
    weights = {}
    for name, shape in tensor_table(config):
        base = rng.normal(0.0, scale, shape)
        if name.endswith("layernorm.gamma"):
            base = 1.0 + base
        weights[name] = base.astype(np.float32)
    return weights


# --- emission tables ------------------------------------------------------

def emission_from_probs(probs):
    probs = np.asarray(probs, dtype=np.float32)
    return EmissionMatrix(n=probs.shape[0], probs=probs,
                          log_probs=np.log(probs))


class TablePert:
    """Emission 'model' driven by per-syllable probability tables.

    ``table`` maps syllable -> {char: probability}; the remaining mass is
    spread uniformly over the rest of the char vocabulary so every entry
    stays positive.  Unlisted syllables get a uniform row.
    """

    def __init__(self, char_dict, table):
        self.char_dict = char_dict
        self.table = table

    def emission(self, pinyin):
        n_chars = self.char_dict.num_chars
        rows = []
        for syllable in pinyin:
            spec = self.table.get(syllable, {})
            used = sum(spec.values())
            rest = (1.0 - used) / (n_chars - len(spec))
            row = np.full(n_chars, rest, dtype=np.float64)
            for ch, p in spec.items():
                row[self.char_dict.char_ids[ch]] = p
            rows.append(row)
        probs = np.stack(rows).astype(np.float32)
        return EmissionMatrix(n=len(rows), probs=probs,
                              log_probs=np.log(probs))


def figure1_table():
    """Emission adversarial to the lone third character of the place name.

    Per position the best char path picks 公 (0.7) over 宫 (0.2), yet the
    word node's geometric mean (0.5, 0.5, 0.2) beats the char segment,
    so lexicon injection flips the top-1.
    """
    return {
        "wo": {"我": 0.9},
        "men": {"们": 0.9},
        "qu": {"去": 0.9},
        "yong": {"雍": 0.5, "用": 0.4},
        "he": {"和": 0.5, "河": 0.45},
        "gong": {"公": 0.7, "宫": 0.2},
    }


# --- randomized decoder instances ----------------------------------------

def random_emission(rng, n, num_chars):
    raw = rng.random((n, num_chars)) + 1e-3
    probs = (raw / raw.sum(axis=1, keepdims=True)).astype(np.float32)
    return EmissionMatrix(n=n, probs=probs, log_probs=np.log(probs))


def random_pinyin(rng, char_dict, n, p_unknown=0.0):
    sylls = char_dict.syllable_vocab[2:]
    out = []
    for _ in range(n):
        if p_unknown and rng.random() < p_unknown:
            out.append("zzz")
        else:
            out.append(sylls[int(rng.integers(len(sylls)))])
    return tuple(out)


def random_lattice(rng, char_dict, n=None, p_unknown=0.1, max_words=3):
    """Lattice over random demo-dict pinyin with valid random word nodes."""
    if n is None:
        n = int(rng.integers(1, 7))
    pinyin = random_pinyin(rng, char_dict, n, p_unknown)
    lattice = build_lattice(pinyin, char_dict)
    if n >= 2 and max_words:
        lexicon = WordLexicon(name="random")
        for _ in range(int(rng.integers(0, max_words + 1))):
            start = int(rng.integers(0, n - 1))
            span = int(rng.integers(2, min(3, n - start) + 1))
            chars = []
            for pos in range(start, start + span):
                cands = char_dict.candidates(pinyin[pos])
                if not cands:
                    break
                chars.append(cands[int(rng.integers(len(cands)))])
            if len(chars) == span:
                lexicon.add(LexEntry(word="".join(chars),
                                     pinyin=pinyin[start:start + span]))
        inject_words(lattice, lexicon)
    return lattice


def random_ngram(rng, char_dict, lam=None):
    vocab_size = char_dict.num_chars
    bos, eos = vocab_size, vocab_size + 1
    char_ids = list(range(2, vocab_size))
    unigrams = {}
    for _ in range(int(rng.integers(5, 40))):
        cid = char_ids[int(rng.integers(len(char_ids)))]
        unigrams[cid] = unigrams.get(cid, 0) + int(rng.integers(1, 5))
    bigrams = {}
    for _ in range(int(rng.integers(5, 60))):
        prev = ([bos] + char_ids)[int(rng.integers(len(char_ids) + 1))]
        nxt = (char_ids + [eos])[int(rng.integers(len(char_ids) + 1))]
        bigrams[(prev, nxt)] = bigrams.get((prev, nxt), 0) \
            + int(rng.integers(1, 4))
    if lam is None:
        lam = float(rng.choice([0.5, 0.9]))
    return NgramModel(unigrams, bigrams, vocab_size,
                      char_dict.char_checksum(), lam)


def random_score_config(rng, mode):
    lambda_emit = float(rng.choice([0.0, 0.5, 1.0, 2.0]))
    lambda_trans = float(rng.choice([0.0, 0.7, 1.0]))
    if lambda_emit == 0.0 and lambda_trans == 0.0:
        lambda_emit = 1.0
    return ScoreConfig(lambda_emit=lambda_emit, lambda_trans=lambda_trans,
                       mode=mode)


def random_instance(rng, char_dict, mode=None, p_unknown=0.1, n=None,
                    max_words=3):
    """One (lattice, emission, ngram, config) tuple for oracle comparison."""
    if mode is None:
        mode = ["emission", "combined"][int(rng.integers(2))]
    lattice = random_lattice(rng, char_dict, n=n, p_unknown=p_unknown,
                             max_words=max_words)
    em = random_emission(rng, lattice.n, char_dict.num_chars)
    ngram = random_ngram(rng, char_dict) if mode == "combined" else None
    cfg = random_score_config(rng, mode)
    return lattice, em, ngram, cfg
