"""Raw Chinese text to pinyin-character parallel corpus.

The pipeline is: split on punctuation, keep maximal runs of in-dictionary
characters, chunk runs to a maximum length, then derive each chunk's pinyin
by greedy longest-match word segmentation (word entries carry the reading
in context; bare characters fall back to their first listed reading).

Corpus file format: UTF-8 text, one sample per line,
``syl1 syl2 ...<TAB>chars`` with the character string unseparated.
"""

from dataclasses import dataclass

from .errors import CharNotInDictionary, ParseError

# comma, period, question mark, exclamation mark, semicolon, colon, and the
# enumeration comma, in full- and half-width forms
DEFAULT_PUNCTUATION = frozenset("，。？！；：、,.?!;:")


@dataclass(frozen=True)
class RawDocument:
    id: str
    text: str


@dataclass(frozen=True)
class ParallelSample:
    pinyin: tuple
    chars: str
    provenance: str = ""


@dataclass
class CorpusStats:
    articles: int = 0
    sentences: int = 0
    samples: int = 0
    chars: int = 0
    skipped: int = 0

    def as_kv_lines(self):
        return [
            f"articles\t{self.articles}",
            f"sentences\t{self.sentences}",
            f"samples\t{self.samples}",
            f"chars\t{self.chars}",
            f"skipped\t{self.skipped}",
        ]


def segment_sentences(doc, punctuation=DEFAULT_PUNCTUATION):
    """Split document text on punctuation code points, dropping empty parts."""
    segments = []
    current = []
    for ch in doc.text:
        if ch in punctuation:
            if current:
                segments.append("".join(current))
                current = []
        else:
            current.append(ch)
    if current:
        segments.append("".join(current))
    return segments


def normalize(sentence, char_dict):
    """Maximal runs of dictionary characters.

    Digits, Latin letters, punctuation, and out-of-vocabulary characters
    separate runs rather than being deleted, so no character adjacency is
    fabricated across removed material.
    """
    runs = []
    current = []
    for ch in sentence:
        if ch in char_dict.readings:
            current.append(ch)
        elif current:
            runs.append("".join(current))
            current = []
    if current:
        runs.append("".join(current))
    return runs


def chunk(chars, max_len=16):
    """Greedy left-to-right split into pieces of at most max_len characters."""
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    return [chars[i : i + max_len] for i in range(0, len(chars), max_len)]


def text_to_pinyin(chars, word_lexicon, char_dict):
    """Reading sequence for a character string, one syllable per character.

    Greedy longest-match segmentation against the word lexicon; characters
    outside any matched word emit their first (most frequent) dictionary
    reading. Raises CharNotInDictionary when a character has no reading.
    """
    out = []
    i = 0
    n = len(chars)
    while i < n:
        entry = word_lexicon.longest_word_match(chars, i) if word_lexicon else None
        if entry is not None:
            out.extend(entry.pinyin)
            i += len(entry)
            continue
        readings = char_dict.readings.get(chars[i])
        if not readings:
            raise CharNotInDictionary(chars[i], i)
        out.append(readings[0])
        i += 1
    return tuple(out)


@dataclass
class CorpusConfig:
    char_dict: object
    word_lexicon: object = None
    max_len: int = 16
    punctuation: frozenset = DEFAULT_PUNCTUATION


def iter_samples(doc, config, stats=None):
    """Generate ParallelSamples for one document, counting skips in stats."""
    offset = 0
    for segment in segment_sentences(doc, config.punctuation):
        if stats is not None:
            stats.sentences += 1
        for run in normalize(segment, config.char_dict):
            for piece in chunk(run, config.max_len):
                try:
                    pinyin = text_to_pinyin(piece, config.word_lexicon, config.char_dict)
                except CharNotInDictionary:
                    if stats is not None:
                        stats.skipped += 1
                    continue
                yield ParallelSample(pinyin=pinyin, chars=piece, provenance=f"{doc.id}:{offset}")
                offset += 1


def build_parallel_corpus(docs, config, out_path):
    """Write the parallel corpus file and return its statistics.

    Documents are processed in id order, so identical inputs produce a
    byte-identical file.
    """
    stats = CorpusStats()
    with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
        for doc in sorted(docs, key=lambda d: d.id):
            stats.articles += 1
            for sample in iter_samples(doc, config, stats):
                fh.write(" ".join(sample.pinyin))
                fh.write("\t")
                fh.write(sample.chars)
                fh.write("\n")
                stats.samples += 1
                stats.chars += len(sample.chars)
    return stats


def read_parallel_corpus(path):
    """Yield (pinyin tuple, chars) pairs from a corpus file."""
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ParseError(path, line_no, "expected pinyin<TAB>chars")
            pinyin = tuple(parts[0].split())
            chars = parts[1]
            if len(pinyin) != len(chars):
                raise ParseError(path, line_no, "pinyin and character lengths differ")
            yield pinyin, chars


def write_stats(stats, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in stats.as_kv_lines():
            fh.write(line + "\n")
