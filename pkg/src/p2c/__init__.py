"""Pinyin-to-character conversion engine.

Per-position character distributions come from a small bidirectional
transformer encoder; a bigram model supplies transition probabilities; word
lexicons inject multi-character candidates into the decoding lattice, scored
by the geometric mean of their member characters' emissions.
"""

from .decoder import (COMBINED, EMISSION_ONLY, DecodedPath, ScoreConfig,
                      brute_force, node_emission_logscore, path_score, topk,
                      viterbi)
from .engine import Engine, build_engine, convert, load_engine
from .errors import P2CError
from .evaluation import EvalReport, char_precision, evaluate, sentence_exact
from .lattice import Lattice, LatticeNode, build_lattice, inject_words
from .lexicon import (CharDict, LexEntry, WordLexicon, load_char_dict,
                      load_word_lexicon)
from .ngram import NgramModel, train_bigram
from .pert import (EmissionMatrix, PertConfig, PertModel, PertWeights,
                   forward, load_weights, save_weights)

__version__ = "0.1.0"

__all__ = [
    "COMBINED", "EMISSION_ONLY", "CharDict", "DecodedPath", "EmissionMatrix",
    "Engine", "EvalReport", "Lattice", "LatticeNode", "LexEntry",
    "NgramModel", "P2CError", "PertConfig", "PertModel", "PertWeights",
    "ScoreConfig", "WordLexicon", "brute_force", "build_engine",
    "build_lattice", "char_precision", "convert", "evaluate", "forward",
    "inject_words", "load_char_dict", "load_engine", "load_weights",
    "load_word_lexicon", "node_emission_logscore", "path_score",
    "sentence_exact", "topk", "train_bigram", "viterbi",
]
