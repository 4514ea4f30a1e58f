"""Exception hierarchy shared by every module."""


class MetricaError(Exception):
    """Base class for all library errors."""


class InputError(MetricaError, ValueError):
    """Bad input data (maps to exit code 1 in the CLI)."""


# phonology
class UnknownLanguage(InputError):
    """Language code outside the supported set."""


class UnsupportedLanguage(InputError):
    """Known language without scansion-grade phonology (strict mode only)."""


class EmptyWord(InputError):
    pass


class NoVowel(InputError):
    pass


# scansion
class EmptyVerse(InputError):
    pass


class WordError(InputError):
    """A phonology error raised for one word of a verse."""

    def __init__(self, word_index: int, word: str, cause: Exception):
        self.word_index = word_index
        self.word = word
        self.cause = cause
        super().__init__(f"word {word_index} ({word!r}): {cause}")


class InvalidPattern(InputError):
    pass


# rhyme / stanza
class NoStressedSyllable(InputError):
    pass


class TooFewVerses(InputError):
    pass


class TooManyVerses(InputError):
    pass


class VerseError(InputError):
    """A scansion error raised for one verse of a stanza."""

    def __init__(self, verse_index: int, cause: Exception):
        self.verse_index = verse_index
        self.cause = cause
        super().__init__(f"verse {verse_index}: {cause}")


class CatalogError(InputError):
    pass


class ParseError(CatalogError):
    def __init__(self, message: str, line: int | None = None, field: str | None = None):
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)


class UnsatisfiableRule(CatalogError):
    pass


class DuplicateName(CatalogError):
    pass


class EmptyCatalog(CatalogError):
    pass


# corpus / eval
class EmptyInput(InputError):
    pass


class InvalidFractions(InputError):
    pass


class LengthMismatch(InputError):
    pass


class UnknownLabel(InputError):
    pass


class DegenerateClass(InputError):
    pass


class NonPositiveProbability(InputError):
    pass
