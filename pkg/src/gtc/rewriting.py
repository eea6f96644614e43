"""Relator-preserving word rewriting.

Moves operate on raw (unreduced) words and never change the element the
word represents in the group presented by the ambient presentation:
inserting h h^-1, inserting a conjugated relator, or replacing a subword
across a relator occurrence.  Used by the trivial-word sampler of the
word-problem scheme and by ciphertext randomization.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import MoveError
from .tietze import Presentation
from .words import Word, is_cyclic_rotation_of_relator, multiply, invert, free_reduce


@dataclass(frozen=True)
class PairInsert:
    """Insert h h^-1 at a position."""

    pos: int
    h: Word

    def apply(self, w: Word, pres: Presentation) -> Word:
        if not 0 <= self.pos <= len(w):
            raise MoveError(f"insert position {self.pos} out of range")
        h_inv = tuple(-l for l in reversed(self.h.letters))
        return Word(
            w.letters[: self.pos] + self.h.letters + h_inv + w.letters[self.pos:],
            w.rank,
        )


@dataclass(frozen=True)
class RelatorInsert:
    """Insert conj^-1 r^(+-1) conj at a position."""

    pos: int
    rel_idx: int
    inverted: bool
    conj: Word

    def apply(self, w: Word, pres: Presentation) -> Word:
        if not 0 <= self.pos <= len(w):
            raise MoveError(f"insert position {self.pos} out of range")
        if not 0 <= self.rel_idx < len(pres.relators):
            raise MoveError(f"no relator with index {self.rel_idx}")
        r = pres.relators[self.rel_idx].letters
        if self.inverted:
            r = tuple(-l for l in reversed(r))
        c = self.conj.letters
        c_inv = tuple(-l for l in reversed(c))
        return Word(
            w.letters[: self.pos] + c_inv + r + c + w.letters[self.pos:], w.rank
        )


@dataclass(frozen=True)
class Substitute:
    """Replace w[pos:pos+old_len] by ``replacement`` across a relator.

    Legal iff old * replacement^-1 is (up to cyclic reduction) a rotation
    of the relator or its inverse, so the move is an equality in the group.
    """

    pos: int
    old_len: int
    replacement: Word
    rel_idx: int

    def apply(self, w: Word, pres: Presentation) -> Word:
        if not (0 <= self.pos and self.pos + self.old_len <= len(w)):
            raise MoveError("substitution range out of bounds")
        if not 0 <= self.rel_idx < len(pres.relators):
            raise MoveError(f"no relator with index {self.rel_idx}")
        old = Word(w.letters[self.pos: self.pos + self.old_len], w.rank)
        relator = pres.relators[self.rel_idx]
        if not is_cyclic_rotation_of_relator(
            multiply(old, invert(self.replacement)), relator
        ):
            raise MoveError("replacement is not justified by the chosen relator")
        return Word(
            w.letters[: self.pos]
            + self.replacement.letters
            + w.letters[self.pos + self.old_len:],
            w.rank,
        )


RewriteMove = PairInsert | RelatorInsert | Substitute


def apply_moves(w: Word, pres: Presentation, moves) -> Word:
    for move in moves:
        w = move.apply(w, pres)
    return w


def random_substitution(
    w: Word, pres: Presentation, rng: random.Random
) -> Substitute | None:
    """A random legal substitution on w, or None if no relator piece occurs.

    Picks a random relator, lists every (direction, split, position)
    occurrence left to right, and picks one at a random offset.
    """
    if not pres.relators:
        return None
    rel_idx = rng.randrange(len(pres.relators))
    r = pres.relators[rel_idx]
    if len(r) < 2:
        return None
    occurrences = []
    for inverted in (False, True):
        letters = r.letters if not inverted else tuple(-l for l in reversed(r.letters))
        for split in range(1, len(letters)):
            u, v = letters[:split], letters[split:]
            repl = tuple(-l for l in reversed(v))
            for pos in range(len(w) - len(u) + 1):
                if w.letters[pos: pos + len(u)] == u:
                    occurrences.append(
                        Substitute(pos, len(u), Word(repl, w.rank), rel_idx)
                    )
    if not occurrences:
        return None
    return occurrences[rng.randrange(len(occurrences))]


def represents_identity_freely(w: Word) -> bool:
    return len(free_reduce(w).letters) == 0
