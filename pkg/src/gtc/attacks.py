"""Attacks: brute-force solvers, problem reductions, and transcript replays.

Attacks consume public data only (transcripts, published generators);
ground truth never enters an attack.  A report claims success only when
the recovered material is consistent with everything on the transcript,
and the test harness additionally checks recovered keys against the true
session keys.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional

from .errors import AttackFailed, ParseError
from .platforms import Element, Platform, SubgroupGens, eval_word
from .protocols import Transcript, parse_gens
from .words import Word

ENUM_GUARD = 1 << 24


@dataclass
class AttackReport:
    attack: str
    success: bool
    recovered_key: Optional[Element] = None
    work: dict = field(default_factory=dict)
    notes: str = ""


def format_attack_report(report: AttackReport, platform: Platform) -> str:
    lines = [f"attack: {report.attack}", f"success: {str(report.success).lower()}"]
    if report.recovered_key is not None:
        lines.append(f"recovered-key: {platform.serialize_element(report.recovered_key)}")
    for key in sorted(report.work):
        lines.append(f"work-{key}: {report.work[key]}")
    if report.notes:
        lines.append(f"notes: {report.notes}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# brute force

class DlogResult(NamedTuple):
    exponent: Optional[int]
    multiplications: int


def brute_force_dlog(platform: Platform, g: Element, target: Element, bound: int) -> DlogResult:
    """Scan g^n for n = 1..bound; work counter is the number of products."""
    acc = platform.identity()
    for n in range(1, bound + 1):
        acc = platform.multiply(acc, g)
        if acc == target:
            return DlogResult(n, n)
    return DlogResult(None, bound)


def expression_letters(k: int) -> list[int]:
    """Deterministic letter order for expression enumeration."""
    out = []
    for i in range(1, k + 1):
        out.extend((i, -i))
    return out


class CspResult(NamedTuple):
    expr: Optional[Word]
    candidates: int


def brute_force_csp(
    u: Element, v: Element, gens: SubgroupGens, max_len: int
) -> CspResult:
    """Breadth-first over reduced expressions x (length, then letter order)
    until u^x = v.  Complete up to the bound: any planted expression of
    length <= max_len is found (possibly as a shorter equivalent)."""
    platform = gens.platform
    k = len(gens)
    letters = expression_letters(k)
    letter_element = {}
    for i, g in enumerate(gens.gens, start=1):
        letter_element[i] = g
        letter_element[-i] = platform.invert(g)
    candidates = 0
    queue: deque[tuple[tuple[int, ...], Element]] = deque([((), u)])
    while queue:
        expr, value = queue.popleft()
        candidates += 1
        if candidates > ENUM_GUARD:
            raise AttackFailed("conjugator search exceeded the enumeration guard")
        if value == v:
            return CspResult(Word(expr, k), candidates)
        if len(expr) >= max_len:
            continue
        for letter in letters:
            if expr and expr[-1] == -letter:
                continue
            g = letter_element[letter]
            queue.append(
                (expr + (letter,), platform.conjugate(value, g))
            )
    return CspResult(None, candidates)


def enumerate_subgroup_values(
    gens: SubgroupGens, max_len: int
) -> dict[str, tuple[Element, Word]]:
    """Deduplicated subgroup elements reachable by expressions of bounded
    length, keyed by serialization; keeps the first (shortest) expression."""
    platform = gens.platform
    k = len(gens)
    letters = expression_letters(k)
    letter_element = {}
    for i, g in enumerate(gens.gens, start=1):
        letter_element[i] = g
        letter_element[-i] = platform.invert(g)
    out: dict[str, tuple[Element, Word]] = {}
    ident = platform.identity()
    out[platform.serialize_element(ident)] = (ident, Word((), k))
    frontier = [((), ident)]
    for _ in range(max_len):
        new_frontier = []
        for expr, value in frontier:
            for letter in letters:
                if expr and expr[-1] == -letter:
                    continue
                nv = platform.multiply(value, letter_element[letter])
                key = platform.serialize_element(nv)
                if key not in out:
                    if len(out) >= ENUM_GUARD:
                        raise AttackFailed("subgroup enumeration exceeded the guard")
                    ne = expr + (letter,)
                    out[key] = (nv, Word(ne, k))
                    new_frontier.append((ne, nv))
        frontier = new_frontier
    return out


# ---------------------------------------------------------------------------
# reductions

def decomposition_to_factorization(w: Element, w_prime: Element) -> Element:
    """Left-multiply by w^-1: turns x w y = w' into (x^w) y = w''."""
    platform = w.platform
    return platform.multiply(platform.invert(w), w_prime)


def normal_subgroup_attack(
    w_double_prime: Element, A: SubgroupGens
) -> tuple[Element, Element]:
    """When the instance lies in <A> (guaranteed for a normal A), any a1
    works: return (identity, w'')."""
    membership = A.contains(w_double_prime)
    if membership is None:
        raise AttackFailed("no structural membership test for this subgroup")
    if not membership:
        raise AttackFailed("instance does not lie in the subgroup")
    return A.platform.identity(), w_double_prime


def key_from_decomposition_solution(
    a1: Element, a2: Element, bob_msg: Element
) -> Element:
    """Any pair solving Alice's equation yields the session key."""
    platform = a1.platform
    return platform.multiply(platform.multiply(a1, bob_msg), a2)


class CspInstance(NamedTuple):
    u: Element
    v: Element


def commutator_probe_decomposition(
    w_prime: Element, b1: Element, w: Element
) -> CspInstance:
    """From w' = a w b and a known b1 commuting with a: the commutator
    [w', b1] times b1^-1 equals ((b1^-1)^w)^b, a CSP instance for b."""
    platform = w_prime.platform
    u = platform.conjugate(platform.invert(b1), w)
    v = platform.multiply(platform.commutator(w_prime, b1), platform.invert(b1))
    return CspInstance(u, v)


def commutator_probe_factorization(w_prime: Element, b1: Element) -> CspInstance:
    """From w' = a b: [w', b1] b1^-1 = (b1^-1)^b."""
    platform = w_prime.platform
    u = platform.invert(b1)
    v = platform.multiply(platform.commutator(w_prime, b1), platform.invert(b1))
    return CspInstance(u, v)


def commutator_probe_csp(w_prime: Element, b: Element, w: Element) -> CspInstance:
    """From w' = a^-1 w a: [w', b] b^-1 = (b^-w)^a, a CSP instance for a.
    Several probes with different b may run in parallel."""
    platform = w_prime.platform
    u = platform.conjugate(platform.invert(b), w)
    v = platform.multiply(platform.commutator(w_prime, b), platform.invert(b))
    return CspInstance(u, v)


def uniqueness_check(
    w: Element, target: Element, A: SubgroupGens, bound: int
) -> int:
    """Number of distinct element pairs (a1, a2) in <A> (expressions up to
    ``bound``) with a1 w target-equation a1 * w * a2 = target."""
    platform = A.platform
    values = enumerate_subgroup_values(A, bound)
    by_key = {key: val for key, (val, _) in values.items()}
    count = 0
    for _, (a1, _) in values.items():
        needed = platform.multiply(
            platform.invert(platform.multiply(a1, w)), target
        )
        if platform.serialize_element(needed) in by_key:
            count += 1
    return count


# ---------------------------------------------------------------------------
# length-based attack

def _element_length(e: Element) -> int:
    if e.tag == "free":
        return len(e.payload.letters)
    if e.tag == "direct":
        return len(e.payload[0].letters) + len(e.payload[1].letters)
    raise AttackFailed("platform has no length function")


def length_based_attack(
    transcript: Transcript,
    A: SubgroupGens,
    B: SubgroupGens,
    max_iters: int = 200,
) -> AttackReport:
    """Greedy length descent on a commutator-exchange transcript: peel the
    A-generator that shrinks the conjugated tuple the most; recompute the
    key from the recovered expression like the legitimate party would.
    Reports failure honestly when no letter decreases the length."""
    platform = transcript.platform
    observed = [platform.parse_element(p) for p in transcript.find_all("b")]
    if len(observed) != len(B.gens):
        raise AttackFailed("transcript does not carry one conjugate per generator")
    a_conj = [platform.parse_element(p) for p in transcript.find_all("a")]
    letters = expression_letters(len(A))
    letter_element = {}
    for i, g in enumerate(A.gens, start=1):
        letter_element[i] = g
        letter_element[-i] = platform.invert(g)
    current = list(observed)
    base = list(B.gens)
    peeled: list[int] = []
    iters = 0
    while current != base and iters < max_iters:
        cur_total = sum(_element_length(c) for c in current)
        best = None
        best_total = cur_total
        for letter in letters:
            g_inv = platform.invert(letter_element[letter])
            trial = [platform.conjugate(c, g_inv) for c in current]
            total = sum(_element_length(t) for t in trial)
            if total < best_total:
                best, best_total = (letter, trial), total
        if best is None:
            return AttackReport(
                "length-based", False, work={"iterations": iters},
                notes="no generator decreases the length",
            )
        peeled.append(best[0])
        current = best[1]
        iters += 1
    if current != base:
        return AttackReport(
            "length-based", False, work={"iterations": iters},
            notes="iteration budget exhausted",
        )
    expr = Word(tuple(reversed(peeled)), max(len(A), 1))
    x_val = eval_word(A, expr)
    for bj, obs in zip(B.gens, observed):
        if platform.conjugate(bj, x_val) != obs:
            return AttackReport(
                "length-based", False, work={"iterations": iters},
                notes="descent ended in an inconsistent state",
            )
    key = None
    if a_conj:
        x_y = eval_word(SubgroupGens(platform, tuple(a_conj)), expr)
        key = platform.multiply(platform.invert(x_val), x_y)
    return AttackReport(
        "length-based", True, recovered_key=key, work={"iterations": iters},
        notes="recovered an expression consistent with every conjugate",
    )


# ---------------------------------------------------------------------------
# transcript-level drivers (used by the CLI)

def _transcript_subgroup(t: Transcript, name: str) -> SubgroupGens:
    if name not in t.meta:
        raise ParseError(f"transcript has no '{name}' header")
    return parse_gens(t.platform, t.meta[name], t.meta.get(f"{name}-structure"))


def attack_dh_dlog(t: Transcript, bound: int) -> AttackReport:
    platform = t.platform
    g = platform.generators()[0]
    ga = platform.parse_element(t.find("g^a"))
    gb = platform.parse_element(t.find("g^b"))
    found, work = brute_force_dlog(platform, g, ga, bound)
    if found is None:
        return AttackReport("dlog", False, work={"multiplications": work},
                            notes="exponent not found within bound")
    acc = platform.identity()
    for _ in range(found):
        acc = platform.multiply(acc, gb)
    return AttackReport("dlog", True, recovered_key=acc,
                        work={"multiplications": work},
                        notes=f"recovered exponent {found}")


def attack_ko_lee_csp(t: Transcript, bound: int) -> AttackReport:
    platform = t.platform
    w = platform.parse_element(t.meta["w"])
    A = _transcript_subgroup(t, "A")
    wa = platform.parse_element(t.find("w^a"))
    wb = platform.parse_element(t.find("w^b"))
    expr, candidates = brute_force_csp(w, wa, A, bound)
    if expr is None:
        return AttackReport("csp", False, work={"candidates": candidates},
                            notes="no conjugator within bound")
    key = platform.conjugate(wb, eval_word(A, expr))
    return AttackReport("csp", True, recovered_key=key,
                        work={"candidates": candidates})


def attack_decomposition_normal(t: Transcript) -> AttackReport:
    platform = t.platform
    w = platform.parse_element(t.meta["w"])
    A = _transcript_subgroup(t, "A")
    alice_msg = platform.parse_element(t.records[0].payload)
    bob_msg = platform.parse_element(t.records[1].payload)
    w2 = decomposition_to_factorization(w, alice_msg)
    try:
        a1, a2 = normal_subgroup_attack(w2, A)
    except AttackFailed as exc:
        return AttackReport("normal-subgroup", False, notes=str(exc))
    key = key_from_decomposition_solution(a1, a2, bob_msg)
    return AttackReport("normal-subgroup", True, recovered_key=key,
                        notes="factorization is trivial over the normal subgroup")


def attack_decomposition_factor(t: Transcript, bound: int) -> AttackReport:
    """Reduce to factorization over (A^w, A) and solve by double enumeration."""
    platform = t.platform
    w = platform.parse_element(t.meta["w"])
    A = _transcript_subgroup(t, "A")
    alice_msg = platform.parse_element(t.records[0].payload)
    bob_msg = platform.parse_element(t.records[1].payload)
    w2 = decomposition_to_factorization(w, alice_msg)
    w_inv = platform.invert(w)
    conj_gens = SubgroupGens(
        platform, tuple(platform.multiply(platform.multiply(w_inv, g), w) for g in A.gens)
    )
    left = enumerate_subgroup_values(conj_gens, bound)
    right = enumerate_subgroup_values(A, bound)
    right_by_key = {k: v for k, (v, _) in right.items()}
    examined = 0
    for _, (val, _) in left.items():
        examined += 1
        needed = platform.multiply(platform.invert(val), w2)
        if platform.serialize_element(needed) in right_by_key:
            a1 = platform.multiply(platform.multiply(w, val), w_inv)
            a2 = needed
            if platform.multiply(platform.multiply(a1, w), a2) != alice_msg:
                continue
            key = key_from_decomposition_solution(a1, a2, bob_msg)
            return AttackReport(
                "decomp-factor", True, recovered_key=key,
                work={"candidates": examined},
            )
    return AttackReport("decomp-factor", False, work={"candidates": examined},
                        notes="no factorization within bound")


def attack_twisted_commutator_probe(t: Transcript, bound: int) -> AttackReport:
    """Probe the a1*w*b1 message with each published B generator, CSP-solve
    for the b side, then derive the a side and check it centralizes B."""
    platform = t.platform
    w = platform.parse_element(t.meta["w"])
    A = _transcript_subgroup(t, "A")
    B = _transcript_subgroup(t, "B")
    alice_msg = platform.parse_element(t.find("a1*w*b1"))
    bob_msg = platform.parse_element(t.find("b2*w*a2"))
    total_candidates = 0
    for probe in B.gens:
        instance = commutator_probe_decomposition(alice_msg, probe, w)
        expr, candidates = brute_force_csp(instance.u, instance.v, B, bound)
        total_candidates += candidates
        if expr is None:
            continue
        b_hat = eval_word(B, expr)
        a_hat = platform.multiply(
            platform.multiply(alice_msg, platform.invert(b_hat)), platform.invert(w)
        )
        if any(
            platform.multiply(a_hat, bg) != platform.multiply(bg, a_hat)
            for bg in B.gens
        ):
            continue  # centralizer collision; try the next probe
        key = platform.multiply(platform.multiply(a_hat, bob_msg), b_hat)
        return AttackReport(
            "commutator-probe", True, recovered_key=key,
            work={"candidates": total_candidates},
        )
    return AttackReport(
        "commutator-probe", False, work={"candidates": total_candidates},
        notes="no consistent probe solution within bound",
    )


def attack_aag_length_based(t: Transcript, max_iters: int = 200) -> AttackReport:
    A = _transcript_subgroup(t, "A")
    B = _transcript_subgroup(t, "B")
    return length_based_attack(t, A, B, max_iters)


ATTACK_DRIVERS: dict[str, Callable] = {
    "dlog": lambda t, bound: attack_dh_dlog(t, bound),
    "csp": lambda t, bound: attack_ko_lee_csp(t, bound),
    "normal": lambda t, bound: attack_decomposition_normal(t),
    "decomp-factor": lambda t, bound: attack_decomposition_factor(t, bound),
    "commutator-probe": lambda t, bound: attack_twisted_commutator_probe(t, bound),
    "length-based": lambda t, bound: attack_aag_length_based(t, bound),
}
