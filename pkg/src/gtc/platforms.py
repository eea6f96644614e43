"""Concrete platform groups with exact normal forms.

Every platform exposes the same small contract: identity, multiply,
invert, element (validated construction), eval of a Word over a list of
generator Elements, and bit-exact text serialization.  Payloads are
always canonical: reduced words, residues in [1, p-1], bijective image
tuples, matrices with entries reduced mod p, or pairs of reduced words
for the direct product of two free groups.

All arithmetic is exact integer arithmetic; matrices over Z_p use
hand-rolled Gaussian elimination (sizes are tiny).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional

from .errors import ParseError, RankError, SamplingError
from .words import Word, empty_word, free_reduce, parse_word, random_reduced_word, serialize_word


# ---------------------------------------------------------------------------
# exact linear algebra mod p

def mat_identity(n: int) -> tuple:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def mat_mul(a: tuple, b: tuple, p: int) -> tuple:
    n = len(a)
    bt = tuple(zip(*b))
    return tuple(
        tuple(sum(ra[k] * cb[k] for k in range(n)) % p for cb in bt) for ra in a
    )


def mat_inv(m: tuple, p: int) -> Optional[tuple]:
    """Inverse via Gauss-Jordan; None if singular."""
    n = len(m)
    aug = [list(row) + [1 if i == j else 0 for j in range(n)] for i, row in enumerate(m)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] % p != 0), None)
        if pivot is None:
            return None
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = pow(aug[col][col], p - 2, p)
        aug[col] = [(v * inv) % p for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [(v - f * w) % p for v, w in zip(aug[r], aug[col])]
    return tuple(tuple(row[n:]) for row in aug)


def nullspace_mod_p(rows: list, p: int) -> list:
    """Basis of the right nullspace of a matrix over Z_p."""
    if not rows:
        return []
    n_cols = len(rows[0])
    m = [list(r) for r in rows]
    pivots: list[int] = []
    row = 0
    for col in range(n_cols):
        pivot = next((r for r in range(row, len(m)) if m[r][col] % p != 0), None)
        if pivot is None:
            continue
        m[row], m[pivot] = m[pivot], m[row]
        inv = pow(m[row][col], p - 2, p)
        m[row] = [(v * inv) % p for v in m[row]]
        for r in range(len(m)):
            if r != row and m[r][col]:
                f = m[r][col]
                m[r] = [(v - f * w) % p for v, w in zip(m[r], m[row])]
        pivots.append(col)
        row += 1
        if row == len(m):
            break
    free_cols = [c for c in range(n_cols) if c not in pivots]
    basis = []
    for fc in free_cols:
        vec = [0] * n_cols
        vec[fc] = 1
        for r, pc in enumerate(pivots):
            vec[pc] = (-m[r][fc]) % p
        basis.append(tuple(vec))
    return basis


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def _prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out.append(n)
    return out


# ---------------------------------------------------------------------------
# elements

@dataclass(frozen=True)
class Element:
    """Platform-tagged normal form; equality is payload comparison."""

    platform: "Platform"
    payload: object

    @property
    def tag(self) -> str:
        return self.platform.kind


class Platform:
    """Uniform group contract shared by all platform kinds."""

    kind: str = "abstract"

    def identity(self) -> Element:
        raise NotImplementedError

    def multiply(self, a: Element, b: Element) -> Element:
        raise NotImplementedError

    def invert(self, a: Element) -> Element:
        raise NotImplementedError

    def generators(self) -> list[Element]:
        raise NotImplementedError

    def serialize_element(self, e: Element) -> str:
        raise NotImplementedError

    def parse_element(self, text: str) -> Element:
        raise NotImplementedError

    def random_element(self, rng: random.Random) -> Element:
        raise NotImplementedError

    def conjugate(self, w: Element, x: Element) -> Element:
        """w^x = x^-1 w x."""
        return self.multiply(self.multiply(self.invert(x), w), x)

    def commutator(self, x: Element, y: Element) -> Element:
        """[x, y] = x^-1 y^-1 x y."""
        return self.multiply(
            self.multiply(self.invert(x), self.invert(y)), self.multiply(x, y)
        )

    def spec(self) -> str:
        """One-line parameter form used in file headers."""
        raise NotImplementedError


@dataclass(frozen=True)
class FreePlatform(Platform):
    """Free group of a given rank; normal form is the reduced word."""

    rank: int
    kind: str = field(default="free", init=False)

    def element(self, w: Word) -> Element:
        if w.rank != self.rank:
            raise RankError(f"word rank {w.rank} != platform rank {self.rank}")
        return Element(self, free_reduce(w))

    def identity(self) -> Element:
        return Element(self, empty_word(self.rank))

    def multiply(self, a: Element, b: Element) -> Element:
        from .words import multiply as wmul

        return Element(self, wmul(a.payload, b.payload))

    def invert(self, a: Element) -> Element:
        from .words import invert as winv

        return Element(self, winv(a.payload))

    def generators(self) -> list[Element]:
        return [Element(self, Word((i,), self.rank)) for i in range(1, self.rank + 1)]

    def serialize_element(self, e: Element) -> str:
        return serialize_word(e.payload)

    def parse_element(self, text: str) -> Element:
        return self.element(parse_word(text, self.rank))

    def random_element(self, rng: random.Random, len_range=(1, 8)) -> Element:
        return Element(self, random_reduced_word(self.rank, len_range, rng))

    def spec(self) -> str:
        return f"free {self.rank}"


@dataclass(frozen=True)
class CyclicModP(Platform):
    """Multiplicative group Z_p* with a distinguished generator g."""

    p: int
    g: int
    kind: str = field(default="cyclic", init=False)

    def __post_init__(self) -> None:
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")
        if not 1 <= self.g <= self.p - 1:
            raise ValueError(f"generator {self.g} not a residue mod {self.p}")

    @property
    def order_of_g(self) -> int:
        order = self.p - 1
        for q in _prime_factors(self.p - 1):
            while order % q == 0 and pow(self.g, order // q, self.p) == 1:
                order //= q
        return order

    def element(self, residue: int) -> Element:
        r = residue % self.p
        if r == 0:
            raise ValueError("0 is not in the multiplicative group")
        return Element(self, r)

    def identity(self) -> Element:
        return Element(self, 1)

    def multiply(self, a: Element, b: Element) -> Element:
        return Element(self, (a.payload * b.payload) % self.p)

    def invert(self, a: Element) -> Element:
        return Element(self, pow(a.payload, self.p - 2, self.p))

    def generators(self) -> list[Element]:
        return [Element(self, self.g)]

    def serialize_element(self, e: Element) -> str:
        return str(e.payload)

    def parse_element(self, text: str) -> Element:
        try:
            return self.element(int(text.strip()))
        except ValueError as exc:
            raise ParseError(str(exc)) from None

    def random_element(self, rng: random.Random) -> Element:
        return Element(self, pow(self.g, rng.randrange(self.order_of_g), self.p))

    def spec(self) -> str:
        return f"cyclic {self.p} {self.g}"


@dataclass(frozen=True)
class PermutationPlatform(Platform):
    """Symmetric group on {1..degree}; payload is the 1-based image tuple.

    Composition is left to right: (a*b)(i) = b(a(i)).
    """

    degree: int
    kind: str = field(default="perm", init=False)

    def element(self, images) -> Element:
        img = tuple(images)
        if sorted(img) != list(range(1, self.degree + 1)):
            raise ValueError(f"{img} is not a permutation of 1..{self.degree}")
        return Element(self, img)

    def identity(self) -> Element:
        return Element(self, tuple(range(1, self.degree + 1)))

    def multiply(self, a: Element, b: Element) -> Element:
        return Element(self, tuple(b.payload[i - 1] for i in a.payload))

    def invert(self, a: Element) -> Element:
        inv = [0] * self.degree
        for i, img in enumerate(a.payload, start=1):
            inv[img - 1] = i
        return Element(self, tuple(inv))

    def generators(self) -> list[Element]:
        if self.degree == 1:
            return [self.identity()]
        swap = [2, 1] + list(range(3, self.degree + 1))
        cycle = list(range(2, self.degree + 1)) + [1]
        return [Element(self, tuple(swap)), Element(self, tuple(cycle))]

    def serialize_element(self, e: Element) -> str:
        return " ".join(str(i) for i in e.payload)

    def parse_element(self, text: str) -> Element:
        try:
            return self.element(int(t) for t in text.split())
        except ValueError as exc:
            raise ParseError(str(exc)) from None

    def random_element(self, rng: random.Random) -> Element:
        images = list(range(1, self.degree + 1))
        rng.shuffle(images)
        return Element(self, tuple(images))

    def spec(self) -> str:
        return f"perm {self.degree}"


@dataclass(frozen=True)
class MatrixModP(Platform):
    """GL(n, Z_p); payload is the row tuple-of-tuples with entries in [0, p)."""

    n: int
    p: int
    kind: str = field(default="matrix", init=False)

    def __post_init__(self) -> None:
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")
        if self.n < 1:
            raise ValueError("matrix size must be positive")

    def element(self, rows) -> Element:
        m = tuple(tuple(v % self.p for v in row) for row in rows)
        if len(m) != self.n or any(len(r) != self.n for r in m):
            raise ValueError(f"expected a {self.n}x{self.n} matrix")
        if mat_inv(m, self.p) is None:
            raise ValueError("matrix is not invertible mod p")
        return Element(self, m)

    def identity(self) -> Element:
        return Element(self, mat_identity(self.n))

    def multiply(self, a: Element, b: Element) -> Element:
        return Element(self, mat_mul(a.payload, b.payload, self.p))

    def invert(self, a: Element) -> Element:
        inv = mat_inv(a.payload, self.p)
        if inv is None:
            raise ValueError("matrix is not invertible mod p")
        return Element(self, inv)

    def generators(self) -> list[Element]:
        gens = []
        for i in range(self.n):
            for j in range(self.n):
                if i != j:
                    m = [list(row) for row in mat_identity(self.n)]
                    m[i][j] = 1
                    gens.append(Element(self, tuple(tuple(r) for r in m)))
        root = self._primitive_root()
        diag = [list(row) for row in mat_identity(self.n)]
        diag[0][0] = root
        gens.append(Element(self, tuple(tuple(r) for r in diag)))
        return gens

    def _primitive_root(self) -> int:
        factors = _prime_factors(self.p - 1)
        for cand in range(2, self.p):
            if all(pow(cand, (self.p - 1) // q, self.p) != 1 for q in factors):
                return cand
        return 1  # p == 2

    def serialize_element(self, e: Element) -> str:
        return " ".join(str(v) for row in e.payload for v in row)

    def parse_element(self, text: str) -> Element:
        vals = [int(t) for t in text.split()]
        if len(vals) != self.n * self.n:
            raise ParseError(f"expected {self.n * self.n} entries, got {len(vals)}")
        rows = [vals[i * self.n:(i + 1) * self.n] for i in range(self.n)]
        try:
            return self.element(rows)
        except ValueError as exc:
            raise ParseError(str(exc)) from None

    def random_element(self, rng: random.Random, budget: int = 100) -> Element:
        for _ in range(budget):
            rows = tuple(
                tuple(rng.randrange(self.p) for _ in range(self.n)) for _ in range(self.n)
            )
            if mat_inv(rows, self.p) is not None:
                return Element(self, rows)
        raise SamplingError("no invertible matrix found within retry budget")

    def spec(self) -> str:
        return f"matrix {self.n} {self.p}"


@dataclass(frozen=True)
class DirectFreePlatform(Platform):
    """Direct product of two free groups.

    Letters 1..rank1 evaluate into the first factor, the rest into the
    second; the two factors commute elementwise by construction, and each
    factor is a normal subgroup.  Payload is a pair of reduced words.
    """

    rank1: int
    rank2: int
    kind: str = field(default="direct", init=False)

    def element(self, u: Word, v: Word) -> Element:
        if u.rank != self.rank1 or v.rank != self.rank2:
            raise RankError("component ranks do not match the platform")
        return Element(self, (free_reduce(u), free_reduce(v)))

    def identity(self) -> Element:
        return Element(self, (empty_word(self.rank1), empty_word(self.rank2)))

    def multiply(self, a: Element, b: Element) -> Element:
        from .words import multiply as wmul

        return Element(
            self, (wmul(a.payload[0], b.payload[0]), wmul(a.payload[1], b.payload[1]))
        )

    def invert(self, a: Element) -> Element:
        from .words import invert as winv

        return Element(self, (winv(a.payload[0]), winv(a.payload[1])))

    def generators(self) -> list[Element]:
        out = []
        for i in range(1, self.rank1 + 1):
            out.append(Element(self, (Word((i,), self.rank1), empty_word(self.rank2))))
        for j in range(1, self.rank2 + 1):
            out.append(Element(self, (empty_word(self.rank1), Word((j,), self.rank2))))
        return out

    def serialize_element(self, e: Element) -> str:
        return f"{serialize_word(e.payload[0])}|{serialize_word(e.payload[1])}"

    def parse_element(self, text: str) -> Element:
        parts = text.split("|")
        if len(parts) != 2:
            raise ParseError("direct-product element needs exactly one '|'")
        return self.element(
            parse_word(parts[0], self.rank1), parse_word(parts[1], self.rank2)
        )

    def random_element(self, rng: random.Random, len_range=(0, 6)) -> Element:
        return Element(
            self,
            (
                random_reduced_word(self.rank1, len_range, rng),
                random_reduced_word(self.rank2, len_range, rng),
            ),
        )

    def spec(self) -> str:
        return f"direct {self.rank1} {self.rank2}"


def platform_from_spec(text: str) -> Platform:
    """Inverse of Platform.spec()."""
    parts = text.split()
    try:
        if parts[0] == "free":
            return FreePlatform(int(parts[1]))
        if parts[0] == "cyclic":
            return CyclicModP(int(parts[1]), int(parts[2]))
        if parts[0] == "perm":
            return PermutationPlatform(int(parts[1]))
        if parts[0] == "matrix":
            return MatrixModP(int(parts[1]), int(parts[2]))
        if parts[0] == "direct":
            return DirectFreePlatform(int(parts[1]), int(parts[2]))
    except (IndexError, ValueError) as exc:
        raise ParseError(f"bad platform spec {text!r}: {exc}") from None
    raise ParseError(f"unknown platform kind {parts[0]!r}")


# ---------------------------------------------------------------------------
# subgroups and word evaluation

@dataclass(frozen=True)
class SubgroupGens:
    """An ordered generating list for a subgroup, plus an optional
    structural membership test (block of a matrix group, or a direct
    factor) used by attacks that need decidable membership."""

    platform: Platform
    gens: tuple[Element, ...]
    structure: Optional[tuple] = None

    def __post_init__(self) -> None:
        if not self.gens:
            raise ValueError("generator list must be nonempty")
        for g in self.gens:
            if g.platform != self.platform:
                raise ValueError("generator from a different platform")

    def __len__(self) -> int:
        return len(self.gens)

    def contains(self, e: Element) -> Optional[bool]:
        """Structural membership; None when no test is available."""
        if self.structure is None:
            return None
        kind = self.structure[0]
        if kind == "factor":
            idx = self.structure[1]
            other = e.payload[1] if idx == 1 else e.payload[0]
            return len(other.letters) == 0
        if kind == "block":
            where, half = self.structure[1], self.structure[2]
            n = self.platform.n
            m = e.payload
            lo, hi = (0, half) if where == "top" else (half, n)
            for i in range(n):
                for j in range(n):
                    inside = lo <= i < hi and lo <= j < hi
                    if inside:
                        continue
                    expected = 1 if i == j else 0
                    if m[i][j] != expected:
                        return False
            return True
        return None


def eval_word(gens: SubgroupGens, w: Word) -> Element:
    """Substitute gens[i-1] for letter i (inverse for negative letters)."""
    if w.rank > len(gens.gens):
        raise RankError(f"word rank {w.rank} exceeds {len(gens.gens)} generators")
    platform = gens.platform
    inv_cache: dict[int, Element] = {}
    out = platform.identity()
    for letter in w.letters:
        if letter > 0:
            out = platform.multiply(out, gens.gens[letter - 1])
        else:
            idx = -letter - 1
            if idx not in inv_cache:
                inv_cache[idx] = platform.invert(gens.gens[idx])
            out = platform.multiply(out, inv_cache[idx])
    return out


@dataclass(frozen=True)
class SubgroupExpr:
    """A subgroup element remembered as an expression over the generators."""

    gens: SubgroupGens
    expr: Word

    @property
    def value(self) -> Element:
        return eval_word(self.gens, self.expr)


# ---------------------------------------------------------------------------
# powering

def pow_with_count(platform: Platform, g: Element, n: int) -> tuple[Element, int]:
    """Left-to-right binary powering; returns (g^n, multiplications used)."""
    if n < 0:
        raise ValueError("exponent must be non-negative")
    if n == 0:
        return platform.identity(), 0
    bits = bin(n)[2:]
    acc = g
    mults = 0
    for bit in bits[1:]:
        acc = platform.multiply(acc, acc)
        mults += 1
        if bit == "1":
            acc = platform.multiply(acc, g)
            mults += 1
    return acc, mults


def square_and_multiply(platform: Platform, g: Element, n: int) -> Element:
    """g^n in O(log2 n) multiplications."""
    return pow_with_count(platform, g, n)[0]


# ---------------------------------------------------------------------------
# subgroup constructors

def block_commuting_subgroups(
    n: int, p: int, count_a: int, count_b: int, rng: random.Random
) -> tuple[SubgroupGens, SubgroupGens]:
    """Complementary block-diagonal subgroups of GL(n, Z_p).

    A's generators are diag(M, I), B's are diag(I, N); every element of A
    commutes with every element of B.  Requires even n >= 4.
    """
    if n < 4 or n % 2 != 0:
        raise ValueError("need even n >= 4")
    platform = MatrixModP(n, p)
    half = n // 2
    small = MatrixModP(half, p)

    def embed(m: Element, top: bool) -> Element:
        rows = [list(row) for row in mat_identity(n)]
        off = 0 if top else half
        for i in range(half):
            for j in range(half):
                rows[off + i][off + j] = m.payload[i][j]
        return Element(platform, tuple(tuple(r) for r in rows))

    a_gens = tuple(embed(small.random_element(rng), True) for _ in range(count_a))
    b_gens = tuple(embed(small.random_element(rng), False) for _ in range(count_b))
    return (
        SubgroupGens(platform, a_gens, structure=("block", "top", half)),
        SubgroupGens(platform, b_gens, structure=("block", "bottom", half)),
    )


def direct_factor_subgroups(platform: DirectFreePlatform) -> tuple[SubgroupGens, SubgroupGens]:
    """The two direct factors as subgroups (both normal, commuting)."""
    gens = platform.generators()
    return (
        SubgroupGens(platform, tuple(gens[: platform.rank1]), structure=("factor", 1)),
        SubgroupGens(platform, tuple(gens[platform.rank1:]), structure=("factor", 2)),
    )


def matrix_centralizer_sample(
    g: Element, k: int, rng: random.Random, budget: int = 100
) -> SubgroupGens:
    """Sample k invertible matrices commuting with g.

    Solves the linear system Xg - gX = 0 over Z_p and rejection-samples
    invertible members of the solution space.
    """
    platform = g.platform
    if not isinstance(platform, MatrixModP):
        raise ValueError("centralizer sampling needs a matrix platform")
    n, p = platform.n, platform.p
    m = g.payload
    rows = []
    for i in range(n):
        for j in range(n):
            row = [0] * (n * n)
            for k2 in range(n):
                for l in range(n):
                    coeff = 0
                    if k2 == i:
                        coeff += m[l][j]
                    if l == j:
                        coeff -= m[i][k2]
                    row[k2 * n + l] = coeff % p
            rows.append(tuple(row))
    basis = nullspace_mod_p(rows, p)
    if not basis:
        raise SamplingError("centralizer solution space is empty")  # cannot happen: I commutes
    samples = []
    for _ in range(k):
        for attempt in range(budget):
            coeffs = [rng.randrange(p) for _ in basis]
            vec = [0] * (n * n)
            for c, b in zip(coeffs, basis):
                if c:
                    vec = [(v + c * bv) % p for v, bv in zip(vec, b)]
            mat = tuple(tuple(vec[i * n:(i + 1) * n]) for i in range(n))
            if mat_inv(mat, p) is not None:
                samples.append(Element(platform, mat))
                break
        else:
            raise SamplingError("no invertible centralizer element within retry budget")
    return SubgroupGens(platform, tuple(samples))


def cyclic_subgroup(e: Element) -> SubgroupGens:
    """The subgroup generated by a single element (always commutative)."""
    return SubgroupGens(e.platform, (e,))
