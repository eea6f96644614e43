"""Finite presentations and tracked elementary isomorphisms.

The four classical presentation moves are implemented with exact forward
and backward generator maps, so a chain of moves always knows both the
composed isomorphism and its inverse.  The inverse map is the private
key of the isomorphism-inversion encryption scheme, so it is only ever
produced by replaying the chain, never by searching.

Relator indices are 0-based in the API and 1-based in chain files.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional

from .errors import MoveError, ParseError, RankError
from .words import (
    Word,
    free_reduce,
    invert,
    multiply,
    parse_word,
    serialize_word,
)


@dataclass(frozen=True)
class Presentation:
    """Generator count plus a list of reduced relator words."""

    n_gens: int
    relators: tuple[Word, ...]

    def __post_init__(self) -> None:
        if self.n_gens < 1:
            raise RankError("presentation needs at least one generator")
        for r in self.relators:
            if r.rank != self.n_gens:
                raise RankError("relator rank does not match generator count")
        object.__setattr__(
            self, "relators", tuple(free_reduce(r) for r in self.relators)
        )

    def total_length(self) -> int:
        return sum(len(r) for r in self.relators)


def presentation(n_gens: int, relators) -> Presentation:
    return Presentation(n_gens, tuple(Word(tuple(r), n_gens) for r in relators))


@dataclass(frozen=True)
class GenMap:
    """A generator-image map: x_i of the source goes to images[i-1]."""

    from_gens: int
    to_gens: int
    images: tuple[Word, ...]

    def __post_init__(self) -> None:
        if len(self.images) != self.from_gens:
            raise RankError("need one image per source generator")
        for img in self.images:
            if img.rank != self.to_gens:
                raise RankError("image rank does not match target alphabet")


def identity_map(n_gens: int) -> GenMap:
    return GenMap(n_gens, n_gens, tuple(Word((i,), n_gens) for i in range(1, n_gens + 1)))


def apply_map(m: GenMap, w: Word) -> Word:
    """Substitute images for letters and freely reduce."""
    if w.rank > m.from_gens:
        raise RankError(f"word rank {w.rank} exceeds map domain {m.from_gens}")
    letters: list[int] = []
    for letter in w.letters:
        img = m.images[abs(letter) - 1]
        if letter > 0:
            letters.extend(img.letters)
        else:
            letters.extend(-l for l in reversed(img.letters))
    return free_reduce(Word(tuple(letters), m.to_gens))


def compose_maps(first: GenMap, second: GenMap) -> GenMap:
    """The map 'apply first, then second'."""
    if first.to_gens != second.from_gens:
        raise RankError("maps do not compose")
    return GenMap(
        first.from_gens,
        second.to_gens,
        tuple(apply_map(second, img) for img in first.images),
    )


def format_map(m: GenMap) -> str:
    """Bit-exact text block, one 'map: i -> word' line per generator."""
    return "\n".join(
        f"map: {i} -> {serialize_word(img)}" for i, img in enumerate(m.images, start=1)
    )


# ---------------------------------------------------------------------------
# moves

@dataclass(frozen=True)
class T1Move:
    """Introduce generator y = s: appends generator n+1 and relator y s^-1."""

    s: Word

    def apply(self, p: Presentation) -> tuple[Presentation, GenMap, GenMap]:
        if self.s.rank != p.n_gens:
            raise MoveError("defining word must be over the current alphabet")
        n = p.n_gens + 1
        lift = GenMap(
            p.n_gens, n, tuple(Word((i,), n) for i in range(1, p.n_gens + 1))
        )
        s_new = Word(self.s.letters, n)
        def_rel = multiply(Word((n,), n), invert(s_new))
        new = Presentation(n, tuple(apply_map(lift, r) for r in p.relators) + (def_rel,))
        fwd = lift
        bwd = GenMap(
            n,
            p.n_gens,
            tuple(Word((i,), p.n_gens) for i in range(1, p.n_gens + 1))
            + (free_reduce(self.s),),
        )
        return new, fwd, bwd


@dataclass(frozen=True)
class T2Move:
    """Cancel generator ``gen`` using relator ``rel`` of the form y s^-1."""

    rel: int
    gen: int

    def apply(self, p: Presentation) -> tuple[Presentation, GenMap, GenMap]:
        if not 0 <= self.rel < len(p.relators):
            raise MoveError(f"no relator with index {self.rel}")
        if not 1 <= self.gen <= p.n_gens:
            raise MoveError(f"no generator x{self.gen}")
        if p.n_gens == 1:
            raise MoveError("cannot cancel the last generator")
        r = p.relators[self.rel]
        if not r.letters or r.letters[0] != self.gen:
            raise MoveError("relator is not of the form y*s^-1 for the chosen generator")
        tail = Word(r.letters[1:], p.n_gens)
        if any(abs(l) == self.gen for l in tail.letters):
            raise MoveError("defining word mentions the cancelled generator")
        for i, other in enumerate(p.relators):
            if i != self.rel and any(abs(l) == self.gen for l in other.letters):
                raise MoveError(f"relator {i} still mentions the cancelled generator")
        s = invert(tail)  # y = s in the group

        def drop(wd: Word) -> Word:
            letters = tuple(
                l - 1 if l > self.gen else (l + 1 if l < -self.gen else l)
                for l in wd.letters
            )
            return Word(letters, p.n_gens - 1)

        new_rels = tuple(
            drop(r2) for i, r2 in enumerate(p.relators) if i != self.rel
        )
        new = Presentation(p.n_gens - 1, new_rels)
        fwd_images = []
        for i in range(1, p.n_gens + 1):
            if i == self.gen:
                fwd_images.append(drop(s))
            else:
                fwd_images.append(drop(Word((i,), p.n_gens)))
        fwd = GenMap(p.n_gens, p.n_gens - 1, tuple(fwd_images))
        bwd_images = tuple(
            Word((i if i < self.gen else i + 1,), p.n_gens)
            for i in range(1, p.n_gens)
        )
        bwd = GenMap(p.n_gens - 1, p.n_gens, bwd_images)
        return new, fwd, bwd


@dataclass(frozen=True)
class T3Move:
    """Apply an elementary free-group automorphism to all relators.

    op is one of:
      ("swap", i, j)        x_i <-> x_j
      ("invert", i)         x_i -> x_i^-1
      ("lmul", i, j)        x_i -> x_j^sign(j) * x_i   (j signed, |j| != i)
      ("rmul", i, j)        x_i -> x_i * x_j^sign(j)
    """

    op: tuple

    def _auto(self, n: int, inverse: bool) -> GenMap:
        images = [Word((i,), n) for i in range(1, n + 1)]
        kind = self.op[0]
        if kind == "swap":
            _, i, j = self.op
            images[i - 1], images[j - 1] = Word((j,), n), Word((i,), n)
        elif kind == "invert":
            _, i = self.op
            images[i - 1] = Word((-i,), n)
        elif kind in ("lmul", "rmul"):
            _, i, j = self.op
            jj = -j if inverse else j
            if kind == "lmul":
                images[i - 1] = Word((jj, i), n)
            else:
                images[i - 1] = Word((i, jj), n)
        else:
            raise MoveError(f"unknown automorphism op {kind!r}")
        return GenMap(n, n, tuple(images))

    def apply(self, p: Presentation) -> tuple[Presentation, GenMap, GenMap]:
        kind = self.op[0]
        n = p.n_gens
        idxs = [abs(v) for v in self.op[1:]]
        if any(not 1 <= v <= n for v in idxs):
            raise MoveError(f"generator index out of range in {self.op}")
        if kind in ("lmul", "rmul") and abs(self.op[2]) == self.op[1]:
            raise MoveError("multiply move needs two distinct generators")
        fwd = self._auto(n, inverse=False)
        bwd = self._auto(n, inverse=True)
        new = Presentation(n, tuple(apply_map(fwd, r) for r in p.relators))
        return new, fwd, bwd


T4_ACTIONS = {
    "inv",
    "mul_right",
    "mul_right_inv",
    "mul_left",
    "mul_left_inv",
    "conj",
    "conj_inv",
}


@dataclass(frozen=True)
class T4Move:
    """Rewrite relator i inside the same normal closure.

    Actions: inv; mul_right/mul_left by relator arg (or its inverse);
    conj/conj_inv by generator arg.  Generator maps are the identity.
    """

    i: int
    action: str
    arg: Optional[int] = None

    def apply(self, p: Presentation) -> tuple[Presentation, GenMap, GenMap]:
        if self.action not in T4_ACTIONS:
            raise MoveError(f"unknown relator action {self.action!r}")
        if not 0 <= self.i < len(p.relators):
            raise MoveError(f"no relator with index {self.i}")
        r = p.relators[self.i]
        n = p.n_gens
        if self.action == "inv":
            new_r = invert(r)
        elif self.action.startswith("mul"):
            j = self.arg
            if j is None or not 0 <= j < len(p.relators):
                raise MoveError("multiply action needs another relator index")
            if j == self.i:
                raise MoveError("cannot multiply a relator by itself")
            other = p.relators[j]
            if self.action == "mul_right":
                new_r = multiply(r, other)
            elif self.action == "mul_right_inv":
                new_r = multiply(r, invert(other))
            elif self.action == "mul_left":
                new_r = multiply(other, r)
            else:  # mul_left_inv
                new_r = multiply(invert(other), r)
        else:
            k = self.arg
            if k is None or not 1 <= k <= n:
                raise MoveError("conjugation action needs a generator index")
            x = Word((k,), n)
            if self.action == "conj":
                new_r = multiply(multiply(invert(x), r), x)
            else:
                new_r = multiply(multiply(x, r), invert(x))
        rels = list(p.relators)
        rels[self.i] = new_r
        new = Presentation(n, tuple(rels))
        return new, identity_map(n), identity_map(n)


Move = T1Move | T2Move | T3Move | T4Move


def t1_introduce(p: Presentation, s: Word):
    return T1Move(s).apply(p)


def t2_cancel(p: Presentation, relator_index: int, gen_index: int):
    return T2Move(relator_index, gen_index).apply(p)


def t3_automorphism(p: Presentation, op: tuple):
    return T3Move(op).apply(p)


def t4p_modify(p: Presentation, i: int, action: str, arg: Optional[int] = None):
    return T4Move(i, action, arg).apply(p)


# ---------------------------------------------------------------------------
# chains

@dataclass(frozen=True)
class TietzeChain:
    start: Presentation
    moves: tuple[Move, ...]
    end: Presentation
    phi: GenMap
    phi_inv: GenMap


class ChainBuilder:
    """Accumulates moves while composing phi and phi_inv incrementally."""

    def __init__(self, start: Presentation) -> None:
        self.start = start
        self.current = start
        self.moves: list[Move] = []
        self.phi = identity_map(start.n_gens)
        self.phi_inv = identity_map(start.n_gens)

    def apply(self, move: Move) -> Presentation:
        new, fwd, bwd = move.apply(self.current)
        self.moves.append(move)
        self.current = new
        self.phi = compose_maps(self.phi, fwd)
        self.phi_inv = compose_maps(bwd, self.phi_inv)
        return new

    def chain(self) -> TietzeChain:
        return TietzeChain(
            self.start, tuple(self.moves), self.current, self.phi, self.phi_inv
        )


def compose_chain(chain: TietzeChain) -> tuple[GenMap, GenMap]:
    """Replay the chain from its start; returns (phi, phi_inv).

    Raises MoveError if the stored moves do not replay to the stored end.
    """
    builder = ChainBuilder(chain.start)
    for move in chain.moves:
        builder.apply(move)
    if builder.current != chain.end:
        raise MoveError("chain replay does not reproduce the end presentation")
    return builder.phi, builder.phi_inv


def discard_relators(p: Presentation, keep) -> Presentation:
    """Keep only the relators whose indices are in ``keep``."""
    keep_set = set(keep)
    if not keep_set:
        raise MoveError("keep set must be nonempty")
    if not keep_set <= set(range(len(p.relators))):
        raise MoveError("keep set references missing relators")
    return Presentation(
        p.n_gens, tuple(r for i, r in enumerate(p.relators) if i in keep_set)
    )


# ---------------------------------------------------------------------------
# relator breaking

def _max_shrink_moves(length: int, max_len: int, cap: int) -> int:
    moves = 0
    while length > max_len:
        p = min(length - 2, cap)
        length -= p - 1
        moves += 1
    return moves


def break_relators(p: Presentation, max_len: int) -> TietzeChain:
    """Break every relator longer than max_len into short pieces.

    Each step introduces a new generator for a prefix of the longest
    over-long relator (longest first, lowest index on ties) and rewrites
    that relator through the new definitional relator.  The split prefers
    the largest syllable boundary with prefix length in [2, cap] where
    cap = max(max_len, 4) - 1; a budget guard forces the maximal shrink
    whenever the 2x total-length bound would otherwise be at risk.

    Output: every relator has length <= max(max_len, 4), total relator
    length at most doubles, and the chain replays exactly.
    """
    if max_len < 3:
        raise MoveError("max_len must be at least 3")
    cap = max(max_len, 4) - 1
    builder = ChainBuilder(p)
    content = list(range(len(p.relators)))
    budget = p.total_length() // 2
    moves_done = 0
    while True:
        cur = builder.current
        over = [i for i in content if len(cur.relators[i]) > max_len]
        if not over:
            break
        i = max(over, key=lambda idx: (len(cur.relators[idx]), -idx))
        r = cur.relators[i]
        length = len(r)
        p_limit = min(length - 2, cap)
        split = None
        for q in range(p_limit, 1, -1):
            if r.letters[q - 1] != r.letters[q]:
                split = q
                break
        if split is None:
            split = p_limit
        if split < p_limit:
            # would the smaller bite break the 2x budget in the worst case?
            projected = moves_done + 1 + _max_shrink_moves(length - split + 1, max_len, cap)
            for j in over:
                if j != i:
                    projected += _max_shrink_moves(len(cur.relators[j]), max_len, cap)
            if projected > budget:
                split = p_limit
        s = Word(r.letters[:split], cur.n_gens)
        builder.apply(T1Move(s))
        def_index = len(builder.current.relators) - 1
        builder.apply(T4Move(i, "mul_left", def_index))
        moves_done += 1
    return builder.chain()


# ---------------------------------------------------------------------------
# random chains

def random_move(
    p: Presentation,
    rng: random.Random,
    max_word_len: int = 3,
    max_relator_len: int = 24,
) -> Move:
    """A random T1 / T3 / T4' move that is legal on ``p``."""
    from .words import random_reduced_word

    kinds = ["t1", "t3"]
    if len(p.relators) >= 1:
        kinds.append("t4")
    kind = rng.choice(kinds)
    n = p.n_gens
    if kind == "t1":
        s = random_reduced_word(n, (1, max_word_len), rng)
        return T1Move(s)
    if kind == "t3":
        if n == 1:
            return T3Move(("invert", 1))
        which = rng.choice(["swap", "invert", "lmul", "rmul"])
        if which == "swap":
            i, j = rng.sample(range(1, n + 1), 2)
            return T3Move(("swap", i, j))
        if which == "invert":
            return T3Move(("invert", rng.randint(1, n)))
        i, j = rng.sample(range(1, n + 1), 2)
        if rng.random() < 0.5:
            j = -j
        return T3Move((which, i, j))
    i = rng.randrange(len(p.relators))
    actions = ["inv", "conj", "conj_inv"]
    mul_ok = [
        j
        for j in range(len(p.relators))
        if j != i and len(p.relators[i]) + len(p.relators[j]) <= max_relator_len
    ]
    if mul_ok:
        actions += ["mul_right", "mul_right_inv", "mul_left", "mul_left_inv"]
    action = rng.choice(actions)
    if action.startswith("mul"):
        return T4Move(i, action, rng.choice(mul_ok))
    if action.startswith("conj"):
        return T4Move(i, action, rng.randint(1, n))
    return T4Move(i, "inv")


def random_chain(
    start: Presentation, length: int, rng: random.Random, **move_kwargs
) -> TietzeChain:
    builder = ChainBuilder(start)
    for _ in range(length):
        builder.apply(random_move(builder.current, rng, **move_kwargs))
    return builder.chain()


# ---------------------------------------------------------------------------
# text formats

def format_presentation(p: Presentation) -> str:
    lines = [f"generators: {p.n_gens}"]
    lines.extend(f"relator: {serialize_word(r)}" for r in p.relators)
    return "\n".join(lines)


def parse_presentation(text: str) -> Presentation:
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("generators:"):
        raise ParseError("presentation must start with a 'generators: N' line")
    try:
        n = int(lines[0].split(":", 1)[1])
    except ValueError:
        raise ParseError("bad generator count") from None
    relators = []
    for ln in lines[1:]:
        if not ln.startswith("relator:"):
            raise ParseError(f"unexpected line {ln!r}")
        relators.append(parse_word(ln.split(":", 1)[1], n))
    return Presentation(n, tuple(relators))


def format_move(move: Move) -> str:
    """Chain-file line for a move (1-based indices)."""
    if isinstance(move, T1Move):
        return f"t1 {serialize_word(move.s)}"
    if isinstance(move, T2Move):
        return f"t2 {move.rel + 1} {move.gen}"
    if isinstance(move, T3Move):
        return "t3 " + " ".join(str(v) for v in move.op)
    if isinstance(move, T4Move):
        parts = [f"t4 {move.i + 1} {move.action}"]
        if move.arg is not None:
            arg = move.arg + 1 if move.action.startswith("mul") else move.arg
            parts.append(str(arg))
        return " ".join(parts)
    raise MoveError(f"unknown move {move!r}")


def parse_move(line: str, rank: int) -> Move:
    parts = line.split()
    if not parts:
        raise ParseError("empty move line")
    try:
        if parts[0] == "t1":
            return T1Move(parse_word(parts[1], rank))
        if parts[0] == "t2":
            return T2Move(int(parts[1]) - 1, int(parts[2]))
        if parts[0] == "t3":
            op = (parts[1],) + tuple(int(v) for v in parts[2:])
            return T3Move(op)
        if parts[0] == "t4":
            i = int(parts[1]) - 1
            action = parts[2]
            arg = None
            if len(parts) > 3:
                arg = int(parts[3]) - 1 if action.startswith("mul") else int(parts[3])
            return T4Move(i, action, arg)
    except (IndexError, ValueError) as exc:
        raise ParseError(f"bad move line {line!r}: {exc}") from None
    raise ParseError(f"unknown move kind {parts[0]!r}")


def format_chain(chain: TietzeChain) -> str:
    lines = []
    current = chain.start
    for move in chain.moves:
        lines.append(format_move(move))
        current = move.apply(current)[0]
    return "\n".join(lines)


def replay_chain_file(start: Presentation, text: str) -> TietzeChain:
    builder = ChainBuilder(start)
    for raw in text.strip().splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        builder.apply(parse_move(line, builder.current.n_gens))
    return builder.chain()
