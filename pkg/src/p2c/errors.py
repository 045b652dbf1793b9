"""Exception types shared across the engine."""


class P2CError(Exception):
    """Base class for every error raised by this package."""


class ParseError(P2CError):
    """A dictionary, lexicon, or corpus file line could not be parsed."""

    def __init__(self, path, line_no, message):
        super().__init__(f"{path}:{line_no}: {message}")
        self.path = str(path)
        self.line_no = line_no


class DuplicateSyllable(P2CError):
    """The same syllable appears on two lines of a character dictionary."""


class EmptyDictionary(P2CError):
    """A character dictionary file contains no syllable entries."""


class CharNotInDictionary(P2CError):
    """A character has no reading in the character dictionary."""

    def __init__(self, char, position):
        super().__init__(f"no reading for {char!r} at position {position}")
        self.char = char
        self.position = position


class VocabMismatch(P2CError):
    """Corpus text contains a character outside the dictionary vocabulary."""


class ChecksumMismatch(P2CError):
    """A model file was built against a different vocabulary."""


class FormatError(P2CError):
    """A binary model file is malformed, truncated, or corrupted."""


class ShapeMismatch(P2CError):
    """A weight tensor does not have the shape the config requires."""

    def __init__(self, tensor, expected, found):
        super().__init__(f"tensor {tensor}: expected shape {expected}, found {found}")
        self.tensor = tensor
        self.expected = tuple(expected)
        self.found = tuple(found)


class SequenceTooLong(P2CError):
    """Input exceeds the model's maximum sequence length."""


class InvalidTokenId(P2CError):
    """A token id is outside the embedding table."""


class EmptyInput(P2CError):
    """An empty pinyin sequence cannot be converted."""


class LengthMismatch(P2CError):
    """Hypothesis and reference sequences differ in length."""


class NoPath(P2CError):
    """The lattice has no full tiling from start to end."""


class ModeError(P2CError):
    """The requested scoring mode is missing a required model."""


class TooManyPaths(P2CError):
    """Exhaustive enumeration was asked for an intractably large lattice."""
