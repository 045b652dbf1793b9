"""Engine assembly: dictionary, lexicons, models, and scoring config.

An Engine is an immutable bundle; conversion is a pure function over it, so
one engine may serve arbitrarily many concurrent conversions.  Engines load
either from explicit paths or from a JSON config file whose relative paths
resolve against the file's own directory.  All cross-artifact checksums are
verified at load time, never on the conversion path.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path

from . import ngram as ngram_mod
from .decoder import COMBINED, ScoreConfig, topk
from .errors import EmptyInput, FormatError, ModeError
from .lattice import build_lattice, inject_words
from .lexicon import load_char_dict, load_word_lexicon
from .pert import PertModel


@dataclass(frozen=True)
class Engine:
    char_dict: object
    pert: PertModel
    ngram: object = None
    lexicons: tuple = ()
    score: ScoreConfig = ScoreConfig()
    k: int = 5

    def lexicon_names(self):
        return [lx.name for lx in self.lexicons]

    def config_echo(self):
        return {
            "mode": self.score.mode,
            "lambda_emit": self.score.lambda_emit,
            "lambda_trans": self.score.lambda_trans,
            "emission_floor": self.score.emission_floor,
            "k": self.k,
            "lexicons": self.lexicon_names(),
            "has_ngram": self.ngram is not None,
            "chars": self.char_dict.num_chars,
            "syllables": self.char_dict.num_syllables,
        }

    def describe(self):
        lex = ",".join(self.lexicon_names()) or "-"
        return (f"mode={self.score.mode} le={self.score.lambda_emit:g} "
                f"lt={self.score.lambda_trans:g} lex={lex}")


def convert(pinyin, engine, k=None, mode=None, lexicon_names=None):
    """Build the lattice, inject lexicons, run the encoder, rank paths.

    ``mode`` overrides the engine's scoring mode for this call;
    ``lexicon_names`` restricts injection to the named lexicons (None means
    all attached ones).
    """
    pinyin = tuple(pinyin)
    if not pinyin:
        raise EmptyInput("empty pinyin sequence")
    cfg = engine.score if mode is None else replace(engine.score, mode=mode)
    if cfg.mode == COMBINED and engine.ngram is None:
        raise ModeError("engine has no transition model; combined mode "
                        "unavailable")
    lattice = build_lattice(pinyin, engine.char_dict)
    for lx in engine.lexicons:
        if lexicon_names is None or lx.name in lexicon_names:
            inject_words(lattice, lx)
    em = engine.pert.emission(pinyin)
    return topk(lattice, em, engine.ngram, cfg, k or engine.k)


def build_engine(char_dict_path, weights_path, ngram_path=None,
                 lexicon_paths=(), score=None, k=5):
    char_dict = load_char_dict(char_dict_path)
    pert = PertModel.load(weights_path, char_dict)
    ng = ngram_mod.load(ngram_path, char_dict) if ngram_path else None
    lexicons = tuple(load_word_lexicon(p, char_dict, name=Path(p).stem)
                     for p in lexicon_paths)
    if score is None:
        score = ScoreConfig() if ng is not None \
            else ScoreConfig(mode="emission")
    return Engine(char_dict=char_dict, pert=pert, ngram=ng,
                  lexicons=lexicons, score=score, k=k)


def load_engine(config_path):
    """Assemble an engine from a JSON config file.

    Recognized keys: char_dict, weights, ngram, lexicons (list of paths),
    mode, lambda_emit, lambda_trans, emission_floor, k.
    """
    config_path = Path(config_path)
    try:
        raw = json.loads(config_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FormatError(f"engine config is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise FormatError("engine config must be a JSON object")
    for key in ("char_dict", "weights"):
        if key not in raw:
            raise FormatError(f"engine config missing {key!r}")
    base = config_path.parent

    def resolve(p):
        return str((base / p) if not Path(p).is_absolute() else Path(p))

    score_kw = {}
    for key in ("lambda_emit", "lambda_trans", "emission_floor", "mode"):
        if key in raw:
            score_kw[key] = raw[key]
    if "mode" not in score_kw:
        score_kw["mode"] = COMBINED if raw.get("ngram") else "emission"
    try:
        score = ScoreConfig(**score_kw)
    except ValueError as exc:
        raise FormatError(f"invalid engine config: {exc}") from exc
    return build_engine(
        resolve(raw["char_dict"]),
        resolve(raw["weights"]),
        ngram_path=resolve(raw["ngram"]) if raw.get("ngram") else None,
        lexicon_paths=[resolve(p) for p in raw.get("lexicons", [])],
        score=score,
        k=int(raw.get("k", 5)),
    )
