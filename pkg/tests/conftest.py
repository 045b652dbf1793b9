import pytest

from helpers import DATA, random_weights
from p2c.lexicon import load_char_dict, load_word_lexicon
from p2c.ngram import save as save_ngram
from p2c.ngram import train_bigram
from p2c.pert import PertConfig, PertWeights, save_weights

DEMO_PARALLEL = (
    "wo men\t我们\n"
    "wo men qu\t我们去\n"
    "chong qing shi\t重庆是\n"
    "yong he gong\t雍和宫\n"
    "wo men qu yong he gong\t我们去雍和宫\n"
)


@pytest.fixture(scope="session")
def demo_dict():
    return load_char_dict(DATA / "demo.dict")


@pytest.fixture(scope="session")
def demo_lexicon(demo_dict):
    return load_word_lexicon(DATA / "demo.lex", demo_dict, name="demo")


@pytest.fixture(scope="session")
def tiny_dict():
    return load_char_dict(DATA / "tiny.dict")


@pytest.fixture(scope="session")
def demo_config(demo_dict):
    return PertConfig(num_layers=2, hidden_size=8, num_heads=2,
                      pinyin_vocab_size=demo_dict.num_syllables,
                      char_vocab_size=demo_dict.num_chars, max_len=16)


@pytest.fixture(scope="session")
def demo_artifacts(tmp_path_factory, demo_dict, demo_config):
    """On-disk weights, corpus, and bigram files bound to the demo dict."""
    root = tmp_path_factory.mktemp("demo-artifacts")
    weights = root / "demo.pertw"
    save_weights(weights, demo_config,
                 PertWeights(demo_config, random_weights(demo_config, 1234)),
                 demo_dict.syllable_checksum(), demo_dict.char_checksum())
    corpus = root / "demo.parallel"
    corpus.write_text(DEMO_PARALLEL, encoding="utf-8")
    ngram = root / "demo.ngram"
    save_ngram(train_bigram(corpus, demo_dict), ngram)
    return {"root": root, "weights": weights, "corpus": corpus,
            "ngram": ngram, "char_dict": DATA / "demo.dict",
            "lexicon": DATA / "demo.lex"}
