"""Character dictionary and external word lexicons.

Both files are UTF-8 text and must begin with a version header line:

  character dictionary    ``# p2c-dict v1``
      one line per syllable: ``syllable char1 char2 ...``
      (space separated, candidate characters ordered most-frequent first)

  word lexicon            ``# p2c-lex v1``
      one line per word: ``word<TAB>syl1 syl2 ...[<TAB>weight]``

Integer ids follow file order and are stable across reloads of the same
file. Id 0 is reserved for padding and id 1 for the unknown token, in both
the character and the syllable vocabulary.
"""

import hashlib
from dataclasses import dataclass, field

from .errors import DuplicateSyllable, EmptyDictionary, ParseError

PAD_ID = 0
UNK_ID = 1
PAD_CHAR = "\x00"
UNK_CHAR = "〓"  # 〓, the conventional unknown-glyph placeholder
PAD_SYLLABLE = "<pad>"
UNK_SYLLABLE = "<unk>"

CHAR_DICT_HEADER = "# p2c-dict v1"
WORD_LEXICON_HEADER = "# p2c-lex v1"


def vocab_checksum(vocab):
    """Hex digest identifying an ordered vocabulary list."""
    return hashlib.sha256("\n".join(vocab).encode("utf-8")).hexdigest()


class CharDict:
    """Syllable -> candidate characters mapping plus both id spaces.

    ``syllables`` and ``readings`` are mutually consistent: c appears in
    syllables[s] exactly when s appears in readings[c]. Candidate order is
    file order; a character's first listed syllable is its default reading.
    """

    def __init__(self, entries):
        """Build from an ordered list of (syllable, [char, ...]) pairs."""
        self.syllables = {}
        self.readings = {}
        self.syllable_vocab = [PAD_SYLLABLE, UNK_SYLLABLE]
        self.char_vocab = [PAD_CHAR, UNK_CHAR]
        self.syllable_ids = {PAD_SYLLABLE: PAD_ID, UNK_SYLLABLE: UNK_ID}
        self.char_ids = {PAD_CHAR: PAD_ID, UNK_CHAR: UNK_ID}
        for syllable, chars in entries:
            if syllable in self.syllables:
                raise DuplicateSyllable(syllable)
            self.syllables[syllable] = list(chars)
            self.syllable_ids[syllable] = len(self.syllable_vocab)
            self.syllable_vocab.append(syllable)
            for ch in chars:
                if ch not in self.char_ids:
                    self.char_ids[ch] = len(self.char_vocab)
                    self.char_vocab.append(ch)
                self.readings.setdefault(ch, [])
                if syllable not in self.readings[ch]:
                    self.readings[ch].append(syllable)
        if not self.syllables:
            raise EmptyDictionary("no syllable entries")

    def candidates(self, syllable):
        """Dictionary-ordered candidate characters; [] for unknown syllables."""
        return self.syllables.get(syllable, [])

    def char_id(self, ch):
        return self.char_ids.get(ch, UNK_ID)

    def syllable_id(self, syllable):
        return self.syllable_ids.get(syllable, UNK_ID)

    @property
    def num_chars(self):
        return len(self.char_vocab)

    @property
    def num_syllables(self):
        return len(self.syllable_vocab)

    def char_checksum(self):
        return vocab_checksum(self.char_vocab)

    def syllable_checksum(self):
        return vocab_checksum(self.syllable_vocab)


def load_char_dict(path):
    """Parse a ``# p2c-dict v1`` file into a CharDict."""
    entries = []
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0].strip() != CHAR_DICT_HEADER:
        raise ParseError(path, 1, f"missing header {CHAR_DICT_HEADER!r}")
    for line_no, line in enumerate(lines[1:], start=2):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        fields = line.split()
        if len(fields) < 2:
            raise ParseError(path, line_no, "syllable line has no characters")
        syllable, chars = fields[0], fields[1:]
        seen = set()
        for ch in chars:
            if len(ch) != 1:
                raise ParseError(path, line_no, f"{ch!r} is not a single character")
            if ch in (PAD_CHAR, UNK_CHAR):
                raise ParseError(path, line_no, f"{ch!r} is a reserved character")
            if ch in seen:
                raise ParseError(path, line_no, f"duplicate character {ch!r}")
            seen.add(ch)
        entries.append((syllable, chars))
    if not entries:
        raise EmptyDictionary(str(path))
    try:
        return CharDict(entries)
    except DuplicateSyllable as exc:
        raise DuplicateSyllable(f"{path}: {exc}") from exc


@dataclass(frozen=True)
class LexEntry:
    """One word lexicon item: aligned characters and syllables."""

    word: str
    pinyin: tuple
    weight: float = 1.0  # reserved; loaded but not used in scoring

    def __len__(self):
        return len(self.word)


@dataclass
class WordLexicon:
    """Multi-character word entries indexed for syllable-span lookup."""

    name: str = "lexicon"
    entries: list = field(default_factory=list)
    rejected: int = 0
    by_pinyin: dict = field(default_factory=dict)
    by_word: dict = field(default_factory=dict)
    max_span: int = 0

    def add(self, entry):
        self.entries.append(entry)
        self.by_pinyin.setdefault(entry.pinyin, []).append(entry)
        # first entry for a word wins: it carries the default reading
        self.by_word.setdefault(entry.word, entry)
        self.max_span = max(self.max_span, len(entry))

    def longest_word_match(self, chars, start):
        """Longest entry whose characters equal chars[start:start+k], k >= 2."""
        limit = min(self.max_span, len(chars) - start)
        for span in range(limit, 1, -1):
            entry = self.by_word.get(chars[start : start + span])
            if entry is not None:
                return entry
        return None


def match_words(lexicon, pinyin, start):
    """Entries whose syllables equal pinyin[start:start+k] for some k >= 2.

    Longest spans first; entries of equal span keep lexicon file order.
    """
    matches = []
    limit = min(lexicon.max_span, len(pinyin) - start)
    for span in range(limit, 1, -1):
        key = tuple(pinyin[start : start + span])
        matches.extend(lexicon.by_pinyin.get(key, ()))
    return matches


def load_word_lexicon(path, char_dict, name=None):
    """Parse a ``# p2c-lex v1`` file, dropping entries the dictionary rejects.

    An entry is rejected (and counted in ``rejected``) when it is shorter
    than two characters, its word and pinyin lengths differ, a character is
    missing from the dictionary, or a syllable is not a listed reading of
    its aligned character.
    """
    if name is None:
        name = str(path)
    lexicon = WordLexicon(name=name)
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0].strip() != WORD_LEXICON_HEADER:
        raise ParseError(path, 1, f"missing header {WORD_LEXICON_HEADER!r}")
    for line_no, line in enumerate(lines[1:], start=2):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) < 2:
            raise ParseError(path, line_no, "expected word<TAB>syllables")
        word = fields[0].strip()
        pinyin = tuple(fields[1].split())
        weight = 1.0
        if len(fields) >= 3 and fields[2].strip():
            try:
                weight = float(fields[2])
            except ValueError:
                raise ParseError(path, line_no, f"bad weight {fields[2]!r}") from None
            if weight < 0:
                raise ParseError(path, line_no, "weight must be non-negative")
        if _entry_ok(word, pinyin, char_dict):
            lexicon.add(LexEntry(word=word, pinyin=pinyin, weight=weight))
        else:
            lexicon.rejected += 1
    return lexicon


def _entry_ok(word, pinyin, char_dict):
    if len(word) < 2 or len(word) != len(pinyin):
        return False
    for ch, syl in zip(word, pinyin):
        if syl not in char_dict.readings.get(ch, ()):
            return False
    return True
