"""Binary words, prefixes and their factor statistics.

Everything downstream works over the alphabet {0, 1}.  A :class:`Word` is an
immutable sequence of symbols backed by ASCII bytes, which keeps substring
scans at C speed (``bytes.find``) and lets numpy view the same buffer for
vectorised counting.  Prefixes of the infinite sequences built elsewhere are
wrapped in :class:`PrefixApprox` so the finite-scale provenance (how deep the
approximation goes) travels with the data.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator

import numpy as np

from .errors import UsageError

_RUN = re.compile(r"^([01])\^(\d+)$")


class Word:
    """An immutable word over {0, 1}."""

    __slots__ = ("_data",)

    def __init__(self, data: "bytes | str | Word | Iterable[int]"):
        if isinstance(data, Word):
            raw = data._data
        elif isinstance(data, bytes):
            raw = data
        elif isinstance(data, str):
            raw = data.encode("ascii")
        else:
            raw = bytes(48 + int(b) for b in data)
        if raw.strip(b"01") != b"":
            raise UsageError("word must consist of the symbols 0 and 1 only")
        self._data = raw

    # -- basic protocol -------------------------------------------------
    def __len__(self) -> int:
        return len(self._data)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return Word(self._data[i])
        return self._data[i] - 48

    def __iter__(self) -> Iterator[int]:
        return (b - 48 for b in self._data)

    def __eq__(self, other) -> bool:
        return isinstance(other, Word) and self._data == other._data

    def __hash__(self) -> int:
        return hash(self._data)

    def __add__(self, other: "Word") -> "Word":
        return Word(self._data + Word(other)._data)

    def __mul__(self, k: int) -> "Word":
        return Word(self._data * k)

    def __repr__(self) -> str:
        s = self._data.decode()
        if len(s) > 40:
            s = f"{s[:20]}...{s[-10:]}[{len(s)}]"
        return f"Word({s})"

    def __str__(self) -> str:
        return self._data.decode()

    # -- accessors ------------------------------------------------------
    @property
    def data(self) -> bytes:
        return self._data

    def as_array(self) -> np.ndarray:
        """Symbols as a uint8 array of 0/1 values (shares no state)."""
        return np.frombuffer(self._data, dtype=np.uint8) - 48

    def count_ones(self) -> int:
        return self._data.count(b"1")

    def find_all(self, pattern: "Word", end: int | None = None) -> list[int]:
        """All (possibly overlapping) occurrence positions of ``pattern``."""
        pat = Word(pattern)._data
        if not pat:
            raise UsageError("empty pattern")
        out: list[int] = []
        limit = len(self._data) if end is None else min(end, len(self._data))
        i = self._data.find(pat, 0, limit)
        while i != -1:
            out.append(i)
            i = self._data.find(pat, i + 1, limit)
        return out


def parse_word(text: str) -> Word:
    """Parse a word given as literal symbols with optional run shorthand.

    Whitespace separates tokens; each token is either a 01-literal or a run
    ``s^k`` (``s`` a single symbol).  ``"01 0^10"`` is the twelve-symbol word
    ``010000000000``.
    """
    parts: list[bytes] = []
    for tok in text.split():
        m = _RUN.match(tok)
        if m:
            parts.append(m.group(1).encode() * int(m.group(2)))
        elif tok.strip("01") == "":
            parts.append(tok.encode())
        else:
            raise UsageError(f"cannot parse word token {tok!r}")
    if not parts:
        raise UsageError("empty word")
    return Word(b"".join(parts))


def ones_ratio(w: Word) -> Fraction:
    """Exact frequency of the symbol 1 in ``w``."""
    w = Word(w)
    if len(w) == 0:
        raise UsageError("ones_ratio of the empty word")
    return Fraction(w.count_ones(), len(w))


def occurrences(w: Word, pattern: Word, horizon: int | None = None) -> list[int]:
    """Occurrence positions of ``pattern`` in ``w`` (starts ``<= horizon``)."""
    end = None if horizon is None else horizon + len(Word(pattern))
    return Word(w).find_all(pattern, end=end)


def max_gap(positions: "list[int]") -> int | None:
    """Largest gap between consecutive positions (None below two entries).

    Used as the finite-scale syndeticity statistic of an occurrence list.
    """
    if len(positions) < 2:
        return None
    return max(b - a for a, b in zip(positions, positions[1:]))


def language(w: Word, k: int) -> list[Word]:
    """All length-``k`` factors of ``w`` in lexicographic order.

    This is the factor set of a *finite* word; callers interpreting it as the
    language of an infinite sequence must treat it as an under-approximation.
    """
    if k <= 0:
        raise UsageError("factor length must be positive")
    data = Word(w).data
    if k > len(data):
        raise UsageError(f"factor length {k} exceeds the word length {len(data)}")
    seen = {data[i:i + k] for i in range(len(data) - k + 1)}
    return [Word(f) for f in sorted(seen)]


@dataclass(frozen=True)
class PrefixApprox:
    """A finite prefix standing in for an infinite sequence.

    ``depth`` records how the prefix was produced (ladder depth for the
    inductive constructions); ``label`` says what it approximates.
    """

    word: Word
    depth: int
    label: str = ""

    def __len__(self) -> int:
        return len(self.word)
