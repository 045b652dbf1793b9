"""Candidate lattice construction and lexicon word injection.

A lattice node covers a half-open span of input positions.  Char nodes come
one per dictionary candidate; Word nodes span two or more positions and are
added afterward by matching lexicon entries against the pinyin.  Nodes carry
a global insertion index so downstream tie-breaking is reproducible: char
candidates in dictionary order first, word nodes in injection order after.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import EmptyInput
from .lexicon import UNK_CHAR, match_words

CHAR = "char"
WORD = "word"


@dataclass(frozen=True)
class LatticeNode:
    start: int
    end: int
    surface: str
    kind: str
    order: int
    source: object = None  # LexEntry for word nodes
    placeholder: bool = False

    def __len__(self):
        return self.end - self.start


class Lattice:
    """Nodes grouped by start position; immutable once assembly is done."""

    def __init__(self, pinyin, char_dict):
        self.pinyin = tuple(pinyin)
        self.n = len(self.pinyin)
        self.char_dict = char_dict
        self.nodes = [[] for _ in range(self.n)]
        self.incomplete = False
        self._word_keys = set()
        self._order = 0

    def _append(self, start, end, surface, kind, source=None, placeholder=False):
        node = LatticeNode(start, end, surface, kind, self._order,
                           source, placeholder)
        self._order += 1
        self.nodes[start].append(node)
        return node

    def starting_at(self, start):
        return self.nodes[start]

    def all_nodes(self):
        for group in self.nodes:
            yield from group

    def num_nodes(self):
        return sum(len(group) for group in self.nodes)


def build_lattice(pinyin, char_dict):
    """One char node per candidate; unknown syllables get a placeholder."""
    pinyin = tuple(pinyin)
    if not pinyin:
        raise EmptyInput("cannot build a lattice from an empty pinyin sequence")
    lattice = Lattice(pinyin, char_dict)
    for i, syllable in enumerate(pinyin):
        cands = char_dict.candidates(syllable)
        if not cands:
            # An IME must always emit something: cover the position with the
            # unknown glyph and mark the lattice so callers can tell.
            lattice._append(i, i + 1, UNK_CHAR, CHAR, placeholder=True)
            lattice.incomplete = True
            continue
        for ch in cands:
            lattice._append(i, i + 1, ch, CHAR)
    return lattice


def inject_words(lattice, lexicon):
    """Append one Word node per lexicon match; never removes char nodes.

    Duplicate (start, end, surface) spans are kept once even across repeated
    injections from different lexicons.
    """
    for start in range(lattice.n):
        for entry in match_words(lexicon, lattice.pinyin, start):
            key = (start, start + len(entry), entry.word)
            if key in lattice._word_keys:
                continue
            lattice._word_keys.add(key)
            lattice._append(start, start + len(entry), entry.word, WORD,
                            source=entry)
    return lattice


def dump(lattice):
    """Text DAG, one `start end surface kind` line per node."""
    lines = []
    for node in sorted(lattice.all_nodes(), key=lambda nd: (nd.start, nd.order)):
        lines.append(f"{node.start}\t{node.end}\t{node.surface}\t{node.kind}")
    return "\n".join(lines) + ("\n" if lines else "")
