"""Words in the free group on the meridians x, y and their matrix images.

A word is a tuple of (generator, exponent) syllables kept freely reduced.
Evaluating a word under a pair of 2x2 matrices is the brute-force path that
every closed-form matrix formula in the package is checked against.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .rep import Mat2

GENERATORS = ("x", "y")


def _reduce(syllables: Iterable[tuple[str, int]]) -> tuple[tuple[str, int], ...]:
    stack: list[tuple[str, int]] = []
    for gen, exp in syllables:
        if gen not in GENERATORS:
            raise ValueError(f"unknown generator {gen!r}")
        if exp == 0:
            continue
        if stack and stack[-1][0] == gen:
            merged = stack[-1][1] + exp
            stack.pop()
            if merged:
                stack.append((gen, merged))
        else:
            stack.append((gen, exp))
    return tuple(stack)


@dataclass(frozen=True)
class Word:
    syllables: tuple[tuple[str, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "syllables", _reduce(self.syllables))

    @classmethod
    def from_letters(cls, letters: str) -> "Word":
        """Parse 'xYyX'-style text: lowercase is +1, uppercase is -1."""
        out = []
        for ch in letters:
            if ch.lower() not in GENERATORS:
                raise ValueError(f"unknown letter {ch!r}")
            out.append((ch.lower(), 1 if ch.islower() else -1))
        return cls(tuple(out))

    def letters(self) -> str:
        return "".join((g if e > 0 else g.upper()) * abs(e) for g, e in self.syllables)

    def __len__(self) -> int:
        return sum(abs(e) for _, e in self.syllables)

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.syllables + other.syllables)

    def inverse(self) -> "Word":
        return Word(tuple((g, -e) for g, e in reversed(self.syllables)))

    def __pow__(self, k: int) -> "Word":
        base = self if k >= 0 else self.inverse()
        return Word(base.syllables * abs(k))

    def reversed_letters(self) -> "Word":
        """Same letters in the opposite order, exponent signs kept."""
        return Word(tuple(reversed(self.syllables)))

    def exponent_sum(self, gen: str) -> int:
        return sum(e for g, e in self.syllables if g == gen)

    def __str__(self) -> str:
        if not self.syllables:
            return "1"
        return " ".join(g if e == 1 else f"{g}^{e}" for g, e in self.syllables)


X = Word((("x", 1),))
Y = Word((("y", 1),))


def _nonzero(**kw: int) -> None:
    for name, v in kw.items():
        if v == 0:
            raise ValueError(f"{name} must be nonzero")


def word_w(m: int) -> Word:
    """(x y^-1)^m (x^-1 y)^m"""
    _nonzero(m=m)
    return (X * Y.inverse()) ** m * (X.inverse() * Y) ** m


def word_w_star(m: int) -> Word:
    """(y x^-1)^m (y^-1 x)^m, the letter reversal of w."""
    _nonzero(m=m)
    return (Y * X.inverse()) ** m * (Y.inverse() * X) ** m


def word_longitude(m: int, n: int) -> Word:
    _nonzero(m=m, n=n)
    return word_w_star(m) ** n * word_w(m) ** n


def word_relator(m: int, n: int) -> Word:
    """w^n x w^-n y^-1, trivial in the knot group."""
    _nonzero(m=m, n=n)
    wn = word_w(m) ** n
    return wn * X * wn.inverse() * Y.inverse()


def eval_word(word: Word, mx: Mat2, my: Mat2) -> Mat2:
    """Ordered product of the matrices substituted for each letter."""
    table = {"x": mx, "y": my}
    inverses = {}
    result = Mat2.identity()
    for gen, exp in word.syllables:
        if exp > 0:
            base = table[gen]
        else:
            if gen not in inverses:
                inverses[gen] = table[gen].inverse()
            base = inverses[gen]
        for _ in range(abs(exp)):
            result = result @ base
    return result


def abelianization(word: Word) -> tuple[int, int]:
    return word.exponent_sum("x"), word.exponent_sum("y")
