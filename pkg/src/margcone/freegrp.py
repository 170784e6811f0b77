"""Words in a free group: reduction, conjugacy classes, graded enumeration.

A letter is a nonzero int: generator i (0-based) is ``i + 1`` and its
inverse is ``-(i + 1)``.  As strings, generators are a, b, c, ... and
inverses are the uppercase letters.  Letters are ordered
g1 < g1^-1 < g2 < g2^-1 < ...
"""
from __future__ import annotations

import string
from dataclasses import dataclass
from typing import Iterable, Iterator

from .errors import BadIndex, EmptyWord


def letter_key(x: int) -> int:
    return 2 * (abs(x) - 1) + (x < 0)


def _reduce(letters: Iterable[int]) -> tuple:
    out: list = []
    for x in letters:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


@dataclass(frozen=True, order=False)
class Word:
    """A freely reduced word."""

    letters: tuple = ()

    def __post_init__(self):
        letters = tuple(int(x) for x in self.letters)
        if any(x == 0 for x in letters):
            raise BadIndex("0 is not a letter")
        object.__setattr__(self, "letters", _reduce(letters))

    @classmethod
    def parse(cls, s: str) -> "Word":
        letters = []
        for ch in s.strip():
            if ch.isspace() or ch == "1":
                continue
            if not ch.isalpha():
                raise BadIndex(f"bad letter {ch!r} in {s!r}")
            i = string.ascii_lowercase.index(ch.lower()) + 1
            letters.append(i if ch.islower() else -i)
        return cls(tuple(letters))

    def __str__(self):
        return "".join(
            string.ascii_lowercase[abs(x) - 1] if x > 0 else string.ascii_uppercase[abs(x) - 1]
            for x in self.letters
        )

    def __repr__(self):
        return f"Word({str(self)!r})"

    def __len__(self):
        return len(self.letters)

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def __pow__(self, n: int) -> "Word":
        base = self.letters if n >= 0 else self.inverse().letters
        return Word(base * abs(n))

    def inverse(self) -> "Word":
        return Word(tuple(-x for x in reversed(self.letters)))

    def sort_key(self) -> tuple:
        return (len(self.letters), tuple(letter_key(x) for x in self.letters))

    @property
    def rank_needed(self) -> int:
        return max((abs(x) for x in self.letters), default=0)


def as_word(w) -> Word:
    if isinstance(w, Word):
        return w
    if isinstance(w, str):
        return Word.parse(w)
    return Word(tuple(w))


def reduce(letters: Iterable[int]) -> Word:
    return Word(tuple(letters))


def cyclic_reduce(w: Word) -> Word:
    x = w.letters
    i, j = 0, len(x)
    while j - i >= 2 and x[i] == -x[j - 1]:
        i += 1
        j -= 1
    return Word(x[i:j])


def _min_rotation(x: tuple) -> tuple:
    keys = [letter_key(c) for c in x]
    n = len(x)
    best = 0
    for s in range(1, n):
        if keys[s:] + keys[:s] < keys[best:] + keys[:best]:
            best = s
    return x[best:] + x[:best]


@dataclass(frozen=True)
class ConjClass:
    """A conjugacy class, keyed by its minimal cyclically reduced rotation."""

    rep: Word

    def __str__(self):
        return str(self.rep)

    def __repr__(self):
        return f"ConjClass({str(self.rep)!r})"

    def __len__(self):
        return len(self.rep)

    def sort_key(self) -> tuple:
        return self.rep.sort_key()

    def inverse(self) -> "ConjClass":
        return conj_class(self.rep.inverse())


def conj_class(w) -> ConjClass:
    w = cyclic_reduce(as_word(w))
    if not w.letters:
        raise EmptyWord("the identity has no conjugacy class representative here")
    return ConjClass(Word(_min_rotation(w.letters)))


def _letters(k: int) -> list:
    out = []
    for i in range(1, k + 1):
        out += [i, -i]
    return out


def _cyclically_reduced(k: int, n: int) -> Iterator[tuple]:
    """All cyclically reduced words of length n, in lexicographic order."""
    alphabet = _letters(k)
    word = [0] * n

    def rec(pos):
        for x in alphabet:
            if pos and word[pos - 1] == -x:
                continue
            if pos == n - 1 and n > 1 and word[0] == -x:
                continue
            word[pos] = x
            if pos == n - 1:
                yield tuple(word)
            else:
                yield from rec(pos + 1)

    yield from rec(0)


def _is_min_rotation(x: tuple) -> bool:
    keys = [letter_key(c) for c in x]
    for s in range(1, len(x)):
        if keys[s:] + keys[:s] < keys:
            return False
    return True


def enumerate_classes(k: int, L: int, fold_inverses: bool = False) -> list:
    """All conjugacy classes of cyclically reduced length 1..L.

    Sorted by length, then lexicographically.  Inverse classes are distinct
    entries unless ``fold_inverses`` is set, in which case only the smaller
    of each pair {[w], [w^-1]} is kept.
    """
    if k < 1 or L < 0:
        raise ValueError("need k >= 1 and L >= 0")
    out = []
    for n in range(1, L + 1):
        for x in _cyclically_reduced(k, n):
            if _is_min_rotation(x):
                out.append(ConjClass(Word(x)))
    if fold_inverses:
        out = [c for c in out if c.sort_key() <= c.inverse().sort_key()]
    return out


def random_word(rng, k: int, length: int) -> Word:
    """A uniformly random reduced word of exactly the given length."""
    alphabet = _letters(k)
    letters: list = []
    while len(letters) < length:
        x = alphabet[rng.integers(len(alphabet))]
        if letters and letters[-1] == -x:
            continue
        letters.append(x)
    return Word(tuple(letters))


def random_cyclic_word(rng, k: int, length: int) -> Word:
    while True:
        w = random_word(rng, k, length)
        if len(w) < 2 or w.letters[0] != -w.letters[-1]:
            return w
