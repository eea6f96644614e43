"""Words over a signed generator alphabet.

A word is a finite sequence of nonzero integers: letter ``i > 0`` is the
generator ``x_i``, letter ``-i`` is its inverse.  Words carry an explicit
rank (alphabet size) so that mixing alphabets is an error, not a silent
bug.  Words are immutable; reduction is an operation, not an invariant,
because several callers (random sampling, ciphertext rewriting) need the
raw unreduced sequence.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import ParseError, RangeError, RankError


@dataclass(frozen=True)
class Word:
    """A word over the alphabet {x_1..x_rank} and inverses."""

    letters: tuple[int, ...]
    rank: int

    def __post_init__(self) -> None:
        if self.rank < 1:
            raise RankError(f"rank must be positive, got {self.rank}")
        for letter in self.letters:
            if letter == 0 or abs(letter) > self.rank:
                raise RankError(f"letter {letter} outside alphabet of rank {self.rank}")

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)


def word(letters, rank: int) -> Word:
    """Build a Word from any iterable of letters."""
    return Word(tuple(letters), rank)


def empty_word(rank: int) -> Word:
    return Word((), rank)


def is_reduced(w: Word) -> bool:
    return all(a != -b for a, b in zip(w.letters, w.letters[1:]))


def free_reduce(w: Word) -> Word:
    """Cancel adjacent inverse pairs until none remain (free normal form)."""
    stack: list[int] = []
    for letter in w.letters:
        if stack and stack[-1] == -letter:
            stack.pop()
        else:
            stack.append(letter)
    return Word(tuple(stack), w.rank)


def _require_same_rank(a: Word, b: Word) -> None:
    if a.rank != b.rank:
        raise RankError(f"rank mismatch: {a.rank} vs {b.rank}")


def multiply(a: Word, b: Word) -> Word:
    """Reduced product ab."""
    _require_same_rank(a, b)
    return free_reduce(Word(a.letters + b.letters, a.rank))


def invert(w: Word) -> Word:
    """Reversed, sign-flipped, reduced inverse."""
    return free_reduce(Word(tuple(-l for l in reversed(w.letters)), w.rank))


def conjugate(w: Word, x: Word) -> Word:
    """w^x = x^-1 w x, reduced."""
    _require_same_rank(w, x)
    inv_x = tuple(-l for l in reversed(x.letters))
    return free_reduce(Word(inv_x + w.letters + x.letters, w.rank))


def commutator(x: Word, y: Word) -> Word:
    """[x, y] = x^-1 y^-1 x y, reduced."""
    _require_same_rank(x, y)
    inv_x = tuple(-l for l in reversed(x.letters))
    inv_y = tuple(-l for l in reversed(y.letters))
    return free_reduce(Word(inv_x + inv_y + x.letters + y.letters, x.rank))


def power(w: Word, n: int) -> Word:
    """w^n, reduced (n may be negative)."""
    base = invert(w) if n < 0 else free_reduce(w)
    out = empty_word(w.rank)
    for _ in range(abs(n)):
        out = multiply(out, base)
    return out


def random_word(rank: int, len_range: tuple[int, int], rng: random.Random) -> Word:
    """Uniform random word: length uniform over the inclusive range, each
    letter uniform over the 2*rank signed indices.  Not reduced on output;
    callers that need the free normal form reduce explicitly.
    """
    lo, hi = len_range
    if lo < 0 or hi < lo:
        raise RangeError(f"empty length range [{lo}, {hi}]")
    if rank < 1:
        raise RankError(f"rank must be positive, got {rank}")
    length = rng.randint(lo, hi)
    letters = []
    for _ in range(length):
        v = rng.randrange(2 * rank)
        letters.append(v // 2 + 1 if v % 2 == 0 else -(v // 2 + 1))
    return Word(tuple(letters), rank)


def random_reduced_word(rank: int, len_range: tuple[int, int], rng: random.Random) -> Word:
    """Random word with no adjacent cancelling pair (length is exact)."""
    lo, hi = len_range
    if lo < 0 or hi < lo:
        raise RangeError(f"empty length range [{lo}, {hi}]")
    length = rng.randint(lo, hi)
    letters: list[int] = []
    while len(letters) < length:
        v = rng.randrange(2 * rank)
        letter = v // 2 + 1 if v % 2 == 0 else -(v // 2 + 1)
        if letters and letters[-1] == -letter:
            continue
        letters.append(letter)
    return Word(tuple(letters), rank)


def serialize_word(w: Word) -> str:
    """Canonical text form: comma-separated signed indices, "e" if empty."""
    if not w.letters:
        return "e"
    return ",".join(str(l) for l in w.letters)


def parse_word(text: str, rank: int) -> Word:
    """Parse the canonical text form against a fixed alphabet size."""
    text = text.strip()
    if text == "e":
        return empty_word(rank)
    if not text:
        raise ParseError("empty word text (use 'e' for the identity)")
    letters = []
    for token in text.split(","):
        token = token.strip()
        try:
            value = int(token)
        except ValueError:
            raise ParseError(f"non-integer token {token!r}") from None
        if value == 0:
            raise ParseError("zero is not a valid letter")
        if abs(value) > rank:
            raise ParseError(f"letter {value} outside alphabet of rank {rank}")
        letters.append(value)
    return Word(tuple(letters), rank)


def cyclic_reduce(w: Word) -> Word:
    """Strip matching inverse pairs from both ends of the reduced form."""
    r = free_reduce(w)
    letters = list(r.letters)
    while len(letters) >= 2 and letters[0] == -letters[-1]:
        letters = letters[1:-1]
    return Word(tuple(letters), w.rank)


def is_cyclic_rotation_of_relator(candidate: Word, relator: Word) -> bool:
    """True if ``candidate`` is conjugate to the relator or its inverse in
    the free group, i.e. replacing along ``relator`` is a valid rewrite.
    Both sides are compared cyclically reduced."""
    c = cyclic_reduce(candidate)
    r = cyclic_reduce(relator)
    for target in (r.letters, invert(r).letters):
        if len(c.letters) != len(target):
            continue
        doubled = target + target
        n = len(target)
        for start in range(max(n, 1)):
            if doubled[start:start + n] == c.letters:
                return True
    return False
