"""Two-party key-exchange and public-key protocol sessions.

Every protocol is a deterministic, seedable session machine: it consumes
an explicit RNG stream, produces an ordered Transcript of the public
messages, and returns both parties' keys plus the private material
(retained for test introspection only; attacks never see it).
"""

from __future__ import annotations

import random
import warnings
from dataclasses import dataclass, field
from typing import Optional

from .errors import ParseError, SetupError
from .platforms import (
    CyclicModP,
    Element,
    MatrixModP,
    Platform,
    SubgroupExpr,
    SubgroupGens,
    eval_word,
    matrix_centralizer_sample,
    platform_from_spec,
    square_and_multiply,
)
from .words import Word, random_reduced_word

PROTOCOLS = (
    "dh",
    "elgamal",
    "ko-lee",
    "aag",
    "decomp",
    "twisted",
    "centralizer",
    "commutative",
    "factor",
    "semidirect",
)


# ---------------------------------------------------------------------------
# transcripts

@dataclass(frozen=True)
class TranscriptRecord:
    seq: int
    sender: str
    label: str
    payload: str


@dataclass
class Transcript:
    """The public channel: ordered records plus the public setup data."""

    protocol: str
    platform: Platform
    meta: dict = field(default_factory=dict)
    records: list = field(default_factory=list)

    def add(self, sender: str, label: str, element: Element) -> None:
        self.records.append(
            TranscriptRecord(
                len(self.records) + 1,
                sender,
                label,
                self.platform.serialize_element(element),
            )
        )

    def payloads(self) -> list[str]:
        return [r.payload for r in self.records]

    def find(self, label: str) -> str:
        for r in self.records:
            if r.label == label:
                return r.payload
        raise KeyError(label)

    def find_all(self, prefix: str) -> list[str]:
        return [r.payload for r in self.records if r.label.startswith(prefix)]


def serialize_transcript(t: Transcript) -> str:
    lines = [f"# protocol: {t.protocol}", f"# platform: {t.platform.spec()}"]
    for key in sorted(t.meta):
        lines.append(f"# {key}: {t.meta[key]}")
    for r in t.records:
        lines.append(f"{r.seq} {r.sender} {r.label} {r.payload}")
    return "\n".join(lines) + "\n"


def parse_transcript(text: str) -> Transcript:
    meta: dict = {}
    records = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if ":" not in body:
                raise ParseError(f"bad header line {raw!r}")
            key, value = body.split(":", 1)
            meta[key.strip()] = value.strip()
            continue
        parts = line.split(" ", 3)
        if len(parts) != 4:
            raise ParseError(f"bad record line {raw!r}")
        records.append(TranscriptRecord(int(parts[0]), parts[1], parts[2], parts[3]))
    if "protocol" not in meta or "platform" not in meta:
        raise ParseError("transcript is missing protocol/platform headers")
    platform = platform_from_spec(meta.pop("platform"))
    t = Transcript(meta.pop("protocol"), platform, meta, records)
    for i, r in enumerate(t.records, start=1):
        if r.seq != i:
            raise ParseError("record sequence numbers must increase from 1")
    return t


def serialize_gens(gens: SubgroupGens) -> str:
    return ";".join(gens.platform.serialize_element(g) for g in gens.gens)


def parse_gens(platform: Platform, text: str, structure: Optional[str] = None) -> SubgroupGens:
    elements = tuple(platform.parse_element(part) for part in text.split(";"))
    struct = None
    if structure:
        parts = structure.split()
        if parts[0] == "factor":
            struct = ("factor", int(parts[1]))
        elif parts[0] == "block":
            struct = ("block", parts[1], int(parts[2]))
    return SubgroupGens(platform, elements, structure=struct)


def _structure_text(gens: SubgroupGens) -> Optional[str]:
    if gens.structure is None:
        return None
    return " ".join(str(v) for v in gens.structure)


def _subgroup_meta(t: Transcript, name: str, gens: SubgroupGens) -> None:
    t.meta[name] = serialize_gens(gens)
    st = _structure_text(gens)
    if st:
        t.meta[f"{name}-structure"] = st


# ---------------------------------------------------------------------------
# outcomes and sampling

@dataclass
class SessionOutcome:
    transcript: Transcript
    key_alice: Element
    key_bob: Element
    private_state: dict

    @property
    def agreed(self) -> bool:
        return self.key_alice == self.key_bob


def sample_expr(
    gens: SubgroupGens, rng: random.Random, len_range: tuple[int, int] = (8, 16)
) -> SubgroupExpr:
    """Random private subgroup element, remembered as an expression."""
    return SubgroupExpr(gens, random_reduced_word(len(gens), len_range, rng))


def check_commuting(a: SubgroupGens, b: SubgroupGens) -> None:
    """Elementwise commutation, verified on generator pairs."""
    pf = a.platform
    for x in a.gens:
        for y in b.gens:
            if pf.multiply(x, y) != pf.multiply(y, x):
                raise SetupError("subgroups do not commute elementwise")


def check_commutative(a: SubgroupGens) -> None:
    pf = a.platform
    for i, x in enumerate(a.gens):
        for y in a.gens[i + 1:]:
            if pf.multiply(x, y) != pf.multiply(y, x):
                raise SetupError("generator list is not commutative")


# ---------------------------------------------------------------------------
# cyclic-group protocols

def dh_exchange(
    platform: CyclicModP,
    rng: random.Random,
    a: Optional[int] = None,
    b: Optional[int] = None,
) -> SessionOutcome:
    """Classic two-pass exchange over the cyclic platform."""
    order = platform.order_of_g
    if a is None:
        a = rng.randrange(1, order)
    if b is None:
        b = rng.randrange(1, order)
    g = platform.generators()[0]
    ga = square_and_multiply(platform, g, a)
    gb = square_and_multiply(platform, g, b)
    t = Transcript("dh", platform)
    t.add("Alice", "g^a", ga)
    t.add("Bob", "g^b", gb)
    key_alice = square_and_multiply(platform, gb, a)
    key_bob = square_and_multiply(platform, ga, b)
    return SessionOutcome(t, key_alice, key_bob, {"a": a, "b": b})


def elgamal_encrypt(
    platform: CyclicModP, pk: Element, m: Element, rng: random.Random
) -> tuple[Element, Element]:
    """Returns the two-element ciphertext (m * pk^b, g^b)."""
    order = platform.order_of_g
    b = rng.randrange(1, order)
    g = platform.generators()[0]
    return (
        platform.multiply(m, square_and_multiply(platform, pk, b)),
        square_and_multiply(platform, g, b),
    )


def elgamal_decrypt(
    platform: CyclicModP, a: int, ciphertext: tuple[Element, Element]
) -> Element:
    c1, c2 = ciphertext
    mask = square_and_multiply(platform, c2, a)
    return platform.multiply(c1, platform.invert(mask))


def elgamal_session(
    platform: CyclicModP, rng: random.Random, m: Optional[Element] = None
) -> SessionOutcome:
    """Keygen + encrypt + decrypt roundtrip; keys agree iff decryption is
    correct (key_bob is the plaintext, key_alice the decryption)."""
    order = platform.order_of_g
    a = rng.randrange(1, order)
    g = platform.generators()[0]
    pk = square_and_multiply(platform, g, a)
    if m is None:
        m = platform.random_element(rng)
    c1, c2 = elgamal_encrypt(platform, pk, m, rng)
    t = Transcript("elgamal", platform)
    t.add("Alice", "pk", pk)
    t.add("Bob", "m*c^b", c1)
    t.add("Bob", "g^b", c2)
    recovered = elgamal_decrypt(platform, a, (c1, c2))
    return SessionOutcome(t, recovered, m, {"a": a, "m": m})


# ---------------------------------------------------------------------------
# conjugacy and decomposition family

def ko_lee_exchange(
    platform: Platform,
    w: Element,
    A: SubgroupGens,
    B: SubgroupGens,
    rng: random.Random,
    expr_len: tuple[int, int] = (8, 16),
) -> SessionOutcome:
    """Conjugation exchange: transcript carries w^a and w^b, key is w^(ab)."""
    check_commuting(A, B)
    ea = sample_expr(A, rng, expr_len)
    eb = sample_expr(B, rng, expr_len)
    a, b = ea.value, eb.value
    wa = platform.conjugate(w, a)
    wb = platform.conjugate(w, b)
    t = Transcript("ko-lee", platform)
    t.meta["w"] = platform.serialize_element(w)
    _subgroup_meta(t, "A", A)
    _subgroup_meta(t, "B", B)
    t.add("Alice", "w^a", wa)
    t.add("Bob", "w^b", wb)
    key_alice = platform.conjugate(wb, a)
    key_bob = platform.conjugate(wa, b)
    return SessionOutcome(t, key_alice, key_bob, {"a": ea, "b": eb})


def aag_exchange(
    platform: Platform,
    A: SubgroupGens,
    B: SubgroupGens,
    rng: random.Random,
    expr_len: tuple[int, int] = (8, 16),
) -> SessionOutcome:
    """Commutator exchange; works in any non-abelian platform, no
    commuting-subgroup requirement.  Secrets are expressions over the
    public generator lists, never bare elements."""
    ex = sample_expr(A, rng, expr_len)
    ey = sample_expr(B, rng, expr_len)
    x, y = ex.value, ey.value
    t = Transcript("aag", platform)
    _subgroup_meta(t, "A", A)
    _subgroup_meta(t, "B", B)
    b_conj = [platform.conjugate(bj, x) for bj in B.gens]
    for j, el in enumerate(b_conj, start=1):
        t.add("Alice", f"b{j}^x", el)
    a_conj = [platform.conjugate(ai, y) for ai in A.gens]
    for i, el in enumerate(a_conj, start=1):
        t.add("Bob", f"a{i}^y", el)
    # Alice: x(a_1^y, ...) = x^y, then multiply by x^-1 on the left.
    x_y = eval_word(SubgroupGens(platform, tuple(a_conj)), ex.expr)
    key_alice = platform.multiply(platform.invert(x), x_y)
    # Bob: y(b_1^x, ...) = y^x, multiply by y^-1 on the left, invert.
    y_x = eval_word(SubgroupGens(platform, tuple(b_conj)), ey.expr)
    key_bob = platform.invert(platform.multiply(platform.invert(y), y_x))
    return SessionOutcome(t, key_alice, key_bob, {"x": ex, "y": ey})


def decomposition_exchange(
    platform: Platform,
    w: Element,
    A: SubgroupGens,
    B: SubgroupGens,
    rng: random.Random,
    expr_len: tuple[int, int] = (8, 16),
) -> SessionOutcome:
    """Both parties sandwich the public w; key is a1 b1 w b2 a2."""
    check_commuting(A, B)
    e_a1, e_a2 = sample_expr(A, rng, expr_len), sample_expr(A, rng, expr_len)
    e_b1, e_b2 = sample_expr(B, rng, expr_len), sample_expr(B, rng, expr_len)
    a1, a2, b1, b2 = e_a1.value, e_a2.value, e_b1.value, e_b2.value
    m_alice = platform.multiply(platform.multiply(a1, w), a2)
    m_bob = platform.multiply(platform.multiply(b1, w), b2)
    t = Transcript("decomp", platform)
    t.meta["w"] = platform.serialize_element(w)
    _subgroup_meta(t, "A", A)
    _subgroup_meta(t, "B", B)
    t.add("Alice", "a1*w*a2", m_alice)
    t.add("Bob", "b1*w*b2", m_bob)
    key_alice = platform.multiply(platform.multiply(a1, m_bob), a2)
    key_bob = platform.multiply(platform.multiply(b1, m_alice), b2)
    return SessionOutcome(
        t, key_alice, key_bob, {"a1": e_a1, "a2": e_a2, "b1": e_b1, "b2": e_b2}
    )


def twisted_exchange(
    platform: Platform,
    w: Element,
    A: SubgroupGens,
    B: SubgroupGens,
    rng: random.Random,
    expr_len: tuple[int, int] = (8, 16),
) -> SessionOutcome:
    """Each party mixes one element from each subgroup; key is b2 a1 w b1 a2."""
    check_commuting(A, B)
    e_a1, e_b1 = sample_expr(A, rng, expr_len), sample_expr(B, rng, expr_len)
    e_b2, e_a2 = sample_expr(B, rng, expr_len), sample_expr(A, rng, expr_len)
    a1, b1, b2, a2 = e_a1.value, e_b1.value, e_b2.value, e_a2.value
    m_alice = platform.multiply(platform.multiply(a1, w), b1)
    m_bob = platform.multiply(platform.multiply(b2, w), a2)
    t = Transcript("twisted", platform)
    t.meta["w"] = platform.serialize_element(w)
    _subgroup_meta(t, "A", A)
    _subgroup_meta(t, "B", B)
    t.add("Alice", "a1*w*b1", m_alice)
    t.add("Bob", "b2*w*a2", m_bob)
    key_alice = platform.multiply(platform.multiply(a1, m_bob), b1)
    key_bob = platform.multiply(platform.multiply(b2, m_alice), a2)
    return SessionOutcome(
        t, key_alice, key_bob, {"a1": e_a1, "b1": e_b1, "b2": e_b2, "a2": e_a2}
    )


def centralizer_exchange(
    platform: MatrixModP,
    w: Element,
    rng: random.Random,
    cent_gens: int = 3,
    expr_len: tuple[int, int] = (4, 8),
    a1: Optional[Element] = None,
    b2: Optional[Element] = None,
) -> SessionOutcome:
    """Each party publishes a subgroup of the centralizer of its first
    secret; the peer draws its second secret from that published subgroup."""
    if a1 is None:
        a1 = platform.random_element(rng)
    A_pub = matrix_centralizer_sample(a1, cent_gens, rng)
    if b2 is None:
        b2 = platform.random_element(rng)
    B_pub = matrix_centralizer_sample(b2, cent_gens, rng)
    t = Transcript("centralizer", platform)
    t.meta["w"] = platform.serialize_element(w)
    for i, el in enumerate(A_pub.gens, start=1):
        t.add("Alice", f"centA{i}", el)
    for j, el in enumerate(B_pub.gens, start=1):
        t.add("Bob", f"centB{j}", el)
    e_a2 = sample_expr(B_pub, rng, expr_len)  # from Bob's published subgroup
    e_b1 = sample_expr(A_pub, rng, expr_len)  # from Alice's published subgroup
    a2, b1 = e_a2.value, e_b1.value
    p_a = platform.multiply(platform.multiply(a1, w), a2)
    p_b = platform.multiply(platform.multiply(b1, w), b2)
    t.add("Alice", "a1*w*a2", p_a)
    t.add("Bob", "b1*w*b2", p_b)
    key_alice = platform.multiply(platform.multiply(a1, p_b), a2)
    key_bob = platform.multiply(platform.multiply(b1, p_a), b2)
    return SessionOutcome(
        t, key_alice, key_bob, {"a1": a1, "a2": e_a2, "b1": e_b1, "b2": b2}
    )


def commutative_subgroups_exchange(
    platform: Platform,
    w: Element,
    A: SubgroupGens,
    B: SubgroupGens,
    rng: random.Random,
    expr_len: tuple[int, int] = (8, 16),
) -> SessionOutcome:
    """A and B are each internally commutative (they need not commute with
    each other); key is a1 a2 w b2 b1."""
    check_commutative(A)
    check_commutative(B)
    e_a1, e_b1 = sample_expr(A, rng, expr_len), sample_expr(B, rng, expr_len)
    e_a2, e_b2 = sample_expr(A, rng, expr_len), sample_expr(B, rng, expr_len)
    a1, b1, a2, b2 = e_a1.value, e_b1.value, e_a2.value, e_b2.value
    m_alice = platform.multiply(platform.multiply(a1, w), b1)
    m_bob = platform.multiply(platform.multiply(a2, w), b2)
    t = Transcript("commutative", platform)
    t.meta["w"] = platform.serialize_element(w)
    _subgroup_meta(t, "A", A)
    _subgroup_meta(t, "B", B)
    t.add("Alice", "a1*w*b1", m_alice)
    t.add("Bob", "a2*w*b2", m_bob)
    key_alice = platform.multiply(platform.multiply(a1, m_bob), b1)
    key_bob = platform.multiply(platform.multiply(a2, m_alice), b2)
    return SessionOutcome(
        t, key_alice, key_bob, {"a1": e_a1, "b1": e_b1, "a2": e_a2, "b2": e_b2}
    )


def factorization_exchange(
    platform: Platform,
    A: SubgroupGens,
    B: SubgroupGens,
    rng: random.Random,
    expr_len: tuple[int, int] = (8, 16),
) -> SessionOutcome:
    """Products of one element from each commuting subgroup; key a2 a1 b1 b2."""
    check_commuting(A, B)
    e_a1, e_b1 = sample_expr(A, rng, expr_len), sample_expr(B, rng, expr_len)
    e_a2, e_b2 = sample_expr(A, rng, expr_len), sample_expr(B, rng, expr_len)
    a1, b1, a2, b2 = e_a1.value, e_b1.value, e_a2.value, e_b2.value
    m_alice = platform.multiply(a1, b1)
    m_bob = platform.multiply(a2, b2)
    t = Transcript("factor", platform)
    _subgroup_meta(t, "A", A)
    _subgroup_meta(t, "B", B)
    t.add("Alice", "a1*b1", m_alice)
    t.add("Bob", "a2*b2", m_bob)
    key_alice = platform.multiply(platform.multiply(b1, m_bob), a1)
    key_bob = platform.multiply(platform.multiply(a2, m_alice), b2)
    return SessionOutcome(
        t, key_alice, key_bob, {"a1": e_a1, "b1": e_b1, "a2": e_a2, "b2": e_b2}
    )


# ---------------------------------------------------------------------------
# semidirect-product exchange

class InnerAutomorphism:
    """Conjugation by a fixed invertible h: e -> h^-1 e h."""

    def __init__(self, platform: Platform, h: Element) -> None:
        try:
            self.h_inv = platform.invert(h)
        except ValueError:
            raise SetupError("h must be invertible") from None
        self.platform = platform
        self.h = h

    def apply(self, e: Element) -> Element:
        return self.platform.multiply(self.platform.multiply(self.h_inv, e), self.h)

    def apply_power(self, e: Element, k: int) -> Element:
        """phi^k(e) = h^-k e h^k, via binary powering of h."""
        if k == 0:
            return e
        hk = square_and_multiply(self.platform, self.h, k)
        return self.platform.multiply(
            self.platform.multiply(self.platform.invert(hk), e), hk
        )


class FreeEndomorphism:
    """Generator-image endomorphism of a free platform."""

    def __init__(self, platform, images: tuple[Word, ...]) -> None:
        from .tietze import GenMap

        self.platform = platform
        self.map = GenMap(platform.rank, platform.rank, images)

    def apply(self, e: Element) -> Element:
        from .tietze import apply_map

        return self.platform.element(apply_map(self.map, e.payload))

    def apply_power(self, e: Element, k: int) -> Element:
        out = e
        for _ in range(k):
            out = self.apply(out)
        return out


def inner_automorphism(platform: Platform, h: Element) -> InnerAutomorphism:
    """Endomorphism spec for conjugation by h; SetupError if h is singular."""
    return InnerAutomorphism(platform, h)


def _semidirect_transmission(phi, g: Element, m: int) -> Element:
    """First component of (g, phi)^m: phi^{m-1}(g) ... phi(g) g."""
    acc = g
    for _ in range(m - 1):
        acc = phi.platform.multiply(phi.apply(acc), g)
    return acc


def semidirect_exchange(
    platform: Platform,
    g: Element,
    phi,
    rng: random.Random,
    m: Optional[int] = None,
    n: Optional[int] = None,
    exp_range: tuple[int, int] = (1, 50),
) -> SessionOutcome:
    """Exchange over the cyclic extension of the platform by phi.

    Only the first components of the semidirect pairs are ever placed on
    the transcript; the automorphism powers stay private by construction.
    """
    if m is None:
        m = rng.randint(*exp_range)
    if n is None:
        n = rng.randint(*exp_range)
    if isinstance(phi, InnerAutomorphism):
        hg = platform.multiply(phi.h, g)
        if platform.multiply(phi.h, hg) == platform.multiply(hg, phi.h):
            warnings.warn(
                "h and hg commute; the shared key is the product of the two "
                "transmissions and offers no security",
                stacklevel=2,
            )
    a_msg = _semidirect_transmission(phi, g, m)
    b_msg = _semidirect_transmission(phi, g, n)
    t = Transcript("semidirect", platform)
    t.meta["g"] = platform.serialize_element(g)
    if isinstance(phi, InnerAutomorphism):
        t.meta["h"] = platform.serialize_element(phi.h)
    t.add("Alice", "first-A", a_msg)
    t.add("Bob", "first-B", b_msg)
    key_alice = platform.multiply(phi.apply_power(b_msg, m), a_msg)
    key_bob = platform.multiply(phi.apply_power(a_msg, n), b_msg)
    return SessionOutcome(t, key_alice, key_bob, {"m": m, "n": n})
