"""Command-line entry point.

Subcommands: simulate, attack, paper-examples, montecarlo, wp-encrypt,
hom, solve.  Every command is deterministic under --seed (default: the
GTC_SEED environment variable, else 0, always echoed in the output) and
rerunning with the same seed produces byte-identical files.

Exit codes: 0 success, 1 golden/assertion mismatch, 2 usage or input
error.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import attacks, homenc, problems, protocols, tietze, wordenc
from .errors import GtcError, ParseError
from .platforms import (
    CyclicModP,
    DirectFreePlatform,
    FreePlatform,
    MatrixModP,
    SubgroupGens,
    block_commuting_subgroups,
    cyclic_subgroup,
    direct_factor_subgroups,
)
from .rng import stream
from .words import parse_word, serialize_word


def _resolve_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("GTC_SEED")
    if env is not None:
        return int(env)
    return 0


def _write(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# simulate

_PROTOCOL_PLATFORMS = {
    "dh": {"cyclic"},
    "elgamal": {"cyclic"},
    "aag": {"free"},
    "semidirect": {"matrix"},
    "centralizer": {"matrix"},
    "commutative": {"matrix"},
    "ko-lee": {"matrix", "direct"},
    "decomp": {"matrix", "direct"},
    "twisted": {"matrix", "direct"},
    "factor": {"matrix", "direct"},
}


def _build_session(args, seed: int):
    rng = stream(seed)
    name = args.protocol
    if args.platform is not None and args.platform not in _PROTOCOL_PLATFORMS[name]:
        raise ParseError(
            f"protocol {name} does not run on the {args.platform} platform"
        )
    if name in ("dh", "elgamal"):
        platform = CyclicModP(args.p or 23, args.g or 5)
        if name == "dh":
            return protocols.dh_exchange(platform, rng)
        return protocols.elgamal_session(platform, rng)
    expr_len = (args.min_len, args.max_len)
    if name == "aag":
        platform = FreePlatform(args.rank or 4)
        gens = platform.generators()
        half = len(gens) // 2
        A = SubgroupGens(platform, tuple(gens[:half]))
        B = SubgroupGens(platform, tuple(gens[half:]))
        return protocols.aag_exchange(platform, A, B, rng, expr_len)
    if name == "semidirect":
        platform = MatrixModP(args.n or 3, args.p or 1009)
        g = platform.random_element(rng)
        h = platform.random_element(rng)
        phi = protocols.inner_automorphism(platform, h)
        return protocols.semidirect_exchange(platform, g, phi, rng)
    if name == "centralizer":
        platform = MatrixModP(args.n or 4, args.p or 5)
        w = platform.random_element(rng)
        return protocols.centralizer_exchange(platform, w, rng)
    if name == "commutative":
        platform = MatrixModP(args.n or 4, args.p or 5)
        A = cyclic_subgroup(platform.random_element(rng))
        B = cyclic_subgroup(platform.random_element(rng))
        w = platform.random_element(rng)
        return protocols.commutative_subgroups_exchange(platform, w, A, B, rng, expr_len)
    # commuting-subgroup family: ko-lee, decomp, twisted, factor
    if args.platform == "direct":
        platform = DirectFreePlatform(args.rank or 2, args.rank or 2)
        A, B = direct_factor_subgroups(platform)
    else:
        A, B = block_commuting_subgroups(args.n or 4, args.p or 5, 2, 2, rng)
        platform = A.platform
    w = platform.random_element(rng)
    if name == "ko-lee":
        return protocols.ko_lee_exchange(platform, w, A, B, rng, expr_len)
    if name == "decomp":
        return protocols.decomposition_exchange(platform, w, A, B, rng, expr_len)
    if name == "twisted":
        return protocols.twisted_exchange(platform, w, A, B, rng, expr_len)
    return protocols.factorization_exchange(platform, A, B, rng, expr_len)


def cmd_simulate(args) -> int:
    seed = _resolve_seed(args)
    outcome = _build_session(args, seed)
    _write(args.out, protocols.serialize_transcript(outcome.transcript))
    payload_bytes = sum(len(r.payload) for r in outcome.transcript.records)
    print(
        f"protocol={args.protocol} seed={seed} "
        f"keys-equal={str(outcome.agreed).lower()} "
        f"records={len(outcome.transcript.records)} payload-bytes={payload_bytes}"
    )
    return 0


def cmd_attack(args) -> int:
    try:
        with open(args.transcript) as fh:
            transcript = protocols.parse_transcript(fh.read())
    except OSError as exc:
        print(f"cannot read transcript: {exc}", file=sys.stderr)
        return 2
    driver = attacks.ATTACK_DRIVERS[args.method]
    report = driver(transcript, args.bound)
    text = attacks.format_attack_report(report, transcript.platform)
    _write(args.out, text)
    if args.out is not None:
        print(f"attack={args.method} success={str(report.success).lower()}")
    return 0


# ---------------------------------------------------------------------------
# golden worked examples

GOLDEN_PHI = "map: 1 -> 5\nmap: 2 -> 2\nmap: 3 -> 3"
GOLDEN_PHI_INV = (
    "map: 1 -> 1,2,2\nmap: 2 -> 2\nmap: 3 -> 3\n"
    "map: 4 -> 1,1\nmap: 5 -> 1\nmap: 6 -> 1,1,2"
)
GOLDEN_CIPHERTEXT = "5,5,-4,5,4,2,-6,2"


def cmd_paper_examples(_args) -> int:
    failures = []
    chain = homenc.worked_example_chain()
    phi_text = tietze.format_map(chain.phi)
    phi_inv_text = tietze.format_map(chain.phi_inv)
    print("phi:")
    print(phi_text)
    print("phi-inv:")
    print(phi_inv_text)
    if phi_text != GOLDEN_PHI:
        failures.append(f"phi mismatch:\n{phi_text}\nexpected:\n{GOLDEN_PHI}")
    if phi_inv_text != GOLDEN_PHI_INV:
        failures.append(f"phi-inv mismatch:\n{phi_inv_text}\nexpected:\n{GOLDEN_PHI_INV}")
    kp = homenc.worked_example_keypair()
    plain, moves, expected = homenc.worked_example_encryption()
    ct = homenc.scripted_encrypt(kp.public, plain, moves)
    ct_text = serialize_word(ct)
    print(f"ciphertext: {ct_text}")
    if ct_text != GOLDEN_CIPHERTEXT:
        failures.append(f"ciphertext mismatch: {ct_text} expected {GOLDEN_CIPHERTEXT}")
    decrypted = homenc.hom_decrypt(kp, ct)
    reference = homenc.eval_faithful(kp.public, plain)
    print(f"decrypted: {kp.public.faithful[0].platform.serialize_element(decrypted)}")
    if decrypted != reference:
        failures.append("decryption does not match the plaintext evaluation")
    broken = tietze.break_relators(homenc.worked_example_presentation(), 3)
    lengths = sorted(len(r) for r in broken.end.relators)
    print(f"break: generators={broken.end.n_gens} lengths={lengths}")
    if broken.end.n_gens != 6 or lengths != [3, 3, 3, 3, 4]:
        failures.append(f"relator breaking mismatch: {broken.end.n_gens} gens, {lengths}")
    if failures:
        for f in failures:
            print(f"MISMATCH: {f}", file=sys.stderr)
        return 1
    print("all golden values match")
    return 0


def cmd_montecarlo(args) -> int:
    seed = _resolve_seed(args)
    stats = wordenc.run_trick_treat_trials(
        args.trials, seed, len_range=(args.min_len, args.max_len)
    )
    lines = [
        f"seed: {seed}",
        f"trials: {stats.trials}",
        f"eve-accuracy: {stats.eve_rate:.4f}",
        f"legit-accuracy: {stats.legit_rate:.4f}",
        f"case-1: {stats.case_rate(1):.4f}",
        f"case-2: {stats.case_rate(2):.4f}",
        f"case-3: {stats.case_rate(3):.4f}",
    ]
    text = "\n".join(lines) + "\n"
    _write(args.out, text)
    if args.out is not None:
        print(text, end="")
    return 0


# ---------------------------------------------------------------------------
# word-problem encryption files

def _format_trick_private(key: wordenc.TrickTreatKey) -> str:
    lines = [f"trivial-index: {key.private.trivial_index}"]
    for idx, side in enumerate(key.private.sides, start=1):
        lines.append(f"side: {idx}")
        lines.append(f"kind: {side.kind}")
        lines.append(tietze.format_presentation(side.chain.start))
        for move in side.chain.moves:
            lines.append(f"move: {tietze.format_move(move)}")
    return "\n".join(lines) + "\n"


def _parse_trick_private(text: str) -> wordenc.TrickTreatPrivate:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("trivial-index:"):
        raise ParseError("private key must start with 'trivial-index:'")
    trivial_index = int(lines[0].split(":", 1)[1])
    sides = []
    i = 1
    while i < len(lines):
        if not lines[i].startswith("side:"):
            raise ParseError(f"expected 'side:' line, got {lines[i]!r}")
        i += 1
        kind = lines[i].split(":", 1)[1].strip()
        i += 1
        pres_lines = []
        while i < len(lines) and (
            lines[i].startswith("generators:") or lines[i].startswith("relator:")
        ):
            pres_lines.append(lines[i])
            i += 1
        seed_pres = tietze.parse_presentation("\n".join(pres_lines))
        builder = tietze.ChainBuilder(seed_pres)
        while i < len(lines) and lines[i].startswith("move:"):
            builder.apply(
                tietze.parse_move(lines[i].split(":", 1)[1].strip(), builder.current.n_gens)
            )
            i += 1
        chain = builder.chain()
        sides.append(wordenc.DisguisedGroup(chain.end, chain, kind))
    if len(sides) != 2:
        raise ParseError("private key must describe exactly two sides")
    return wordenc.TrickTreatPrivate(trivial_index, (sides[0], sides[1]))


def _format_trick_public(publics) -> str:
    parts = []
    for idx, pres in enumerate(publics, start=1):
        parts.append(f"presentation: {idx}")
        parts.append(tietze.format_presentation(pres))
    return "\n".join(parts) + "\n"


def _parse_trick_public(text: str):
    blocks = []
    current: list[str] = []
    for ln in text.splitlines():
        ln = ln.strip()
        if not ln:
            continue
        if ln.startswith("presentation:"):
            if current:
                blocks.append("\n".join(current))
            current = []
        else:
            current.append(ln)
    if current:
        blocks.append("\n".join(current))
    if len(blocks) != 2:
        raise ParseError("public key must contain two presentations")
    return tuple(tietze.parse_presentation(b) for b in blocks)


def cmd_wp_encrypt(args) -> int:
    seed = _resolve_seed(args)
    rng = stream(seed)
    if args.action == "keygen":
        key = wordenc.trick_treat_keygen(args.rank, args.chain_len, rng)
        _write(args.out_pub, _format_trick_public(key.publics))
        _write(args.out_priv, _format_trick_private(key))
        print(f"seed={seed} trivial-index={key.private.trivial_index}")
        return 0
    if args.action == "encrypt":
        with open(args.pub) as fh:
            publics = _parse_trick_public(fh.read())
        ct = wordenc.trick_treat_encrypt(
            args.bit, publics, (args.min_len, args.max_len), rng
        )
        _write(args.out, f"{serialize_word(ct.w1)}\n{serialize_word(ct.w2)}\n")
        print(f"seed={seed} bit={args.bit}")
        return 0
    with open(args.priv) as fh:
        private = _parse_trick_private(fh.read())
    with open(args.ct) as fh:
        lines = [ln.strip() for ln in fh.read().splitlines() if ln.strip()]
    if len(lines) != 2:
        print("ciphertext must have two word lines", file=sys.stderr)
        return 2
    ct = wordenc.BitCiphertext(
        parse_word(lines[0], private.sides[0].public.n_gens),
        parse_word(lines[1], private.sides[1].public.n_gens),
    )
    if args.action == "decrypt":
        print(f"bit: {wordenc.trick_treat_decrypt(ct, private)}")
        return 0
    guess, case = wordenc.eve_emulation_attack(
        ct, wordenc.oracle_from_private(private), rng
    )
    print(f"guess: {guess}")
    print(f"case: {case}")
    return 0


# ---------------------------------------------------------------------------
# homomorphic encryption files

def _format_hom_public(pk: homenc.HomomorphicPublicKey) -> str:
    lines = ["[G]", tietze.format_presentation(pk.G)]
    lines += ["[H-hat]", tietze.format_presentation(pk.H_hat)]
    lines += ["[phi]", tietze.format_map(pk.phi)]
    lines.append("[faithful]")
    platform = pk.faithful[0].platform
    for img in pk.faithful:
        lines.append(f"perm: {platform.serialize_element(img)}")
    return "\n".join(lines) + "\n"


def _split_sections(text: str) -> dict[str, list[str]]:
    sections: dict[str, list[str]] = {}
    name = None
    for ln in text.splitlines():
        ln = ln.strip()
        if not ln:
            continue
        if ln.startswith("[") and ln.endswith("]"):
            name = ln[1:-1]
            sections[name] = []
        elif name is not None:
            sections[name].append(ln)
        else:
            raise ParseError(f"line outside any section: {ln!r}")
    return sections


def _parse_hom_public(text: str) -> homenc.HomomorphicPublicKey:
    from .platforms import PermutationPlatform

    sections = _split_sections(text)
    G = tietze.parse_presentation("\n".join(sections["G"]))
    h_hat = tietze.parse_presentation("\n".join(sections["H-hat"]))
    images = []
    for ln in sections["phi"]:
        if not ln.startswith("map:"):
            raise ParseError(f"bad map line {ln!r}")
        _, rest = ln.split(":", 1)
        idx, word_text = rest.split("->")
        images.append((int(idx), parse_word(word_text.strip(), h_hat.n_gens)))
    images.sort()
    phi = tietze.GenMap(len(images), h_hat.n_gens, tuple(w for _, w in images))
    faithful = []
    for ln in sections["faithful"]:
        payload = ln.split(":", 1)[1].strip()
        degree = len(payload.split())
        faithful.append(PermutationPlatform(degree).parse_element(payload))
    return homenc.HomomorphicPublicKey(phi, G, h_hat, tuple(faithful))


def _format_hom_private(kp: homenc.HomomorphicKeyPair) -> str:
    lines = ["[G]", tietze.format_presentation(kp.private.chain.start), "[chain]"]
    for move in kp.private.chain.moves:
        lines.append(f"move: {tietze.format_move(move)}")
    lines.append("[discarded]")
    indices = " ".join(str(i) for i in sorted(kp.private.discarded))
    lines.append(f"indices: {indices if indices else '-'}")
    return "\n".join(lines) + "\n"


def _parse_hom_private(text: str, public: homenc.HomomorphicPublicKey) -> homenc.HomomorphicKeyPair:
    sections = _split_sections(text)
    G = tietze.parse_presentation("\n".join(sections["G"]))
    builder = tietze.ChainBuilder(G)
    for ln in sections.get("chain", []):
        builder.apply(tietze.parse_move(ln.split(":", 1)[1].strip(), builder.current.n_gens))
    chain = builder.chain()
    raw = sections["discarded"][0].split(":", 1)[1].strip()
    discarded = frozenset(int(v) for v in raw.split()) if raw != "-" else frozenset()
    private = homenc.HomomorphicPrivateKey(chain.phi_inv, chain.end, chain, discarded)
    return homenc.HomomorphicKeyPair(public, private)


def cmd_hom(args) -> int:
    seed = _resolve_seed(args)
    rng = stream(seed)
    if args.action == "keygen":
        if args.group == "demo":
            G = homenc.worked_example_presentation()
            faithful = homenc.worked_example_faithful()
        else:
            G = homenc.a5_presentation()
            faithful = homenc.a5_faithful()
        kp = homenc.hom_keygen(G, faithful, args.chain_len, args.discard, rng)
        _write(args.out_pub, _format_hom_public(kp.public))
        _write(args.out_priv, _format_hom_private(kp))
        print(f"seed={seed} generators={kp.private.H.n_gens} "
              f"relators={len(kp.private.H.relators)} discarded={len(kp.private.discarded)}")
        return 0
    if args.action == "encrypt":
        with open(args.pub) as fh:
            pk = _parse_hom_public(fh.read())
        w = parse_word(args.word, pk.G.n_gens)
        ct = homenc.hom_encrypt(pk, w, args.steps, rng)
        _write(args.out, serialize_word(ct) + "\n")
        if args.out is not None:
            print(f"seed={seed} ciphertext-length={len(ct)}")
        return 0
    with open(args.pub) as fh:
        pk = _parse_hom_public(fh.read())
    with open(args.priv) as fh:
        kp = _parse_hom_private(fh.read(), pk)
    with open(args.ct) as fh:
        ct = parse_word(fh.read().strip(), pk.H_hat.n_gens)
    result = homenc.hom_decrypt(kp, ct)
    print(f"plaintext: {result.platform.serialize_element(result)}")
    return 0


# ---------------------------------------------------------------------------
# solve

def cmd_solve(args) -> int:
    with open(args.instance) as fh:
        inst = problems.parse_instance(fh.read())
    if inst.problem != args.problem:
        print(f"instance is a {inst.problem} problem, not {args.problem}",
              file=sys.stderr)
        return 2
    bound = args.bound if args.bound is not None else inst.bound
    if args.problem == "ssp":
        witness = problems.ssp_decide(inst.platform, inst.elements, inst.target)
        print("witness: " + (",".join(map(str, witness)) if witness is not None else "absent"))
    elif args.problem == "kp":
        witness = problems.kp_decide_bounded(inst.platform, inst.elements, inst.target, bound)
        print("witness: " + (",".join(map(str, witness)) if witness is not None else "absent"))
    elif args.problem == "smp":
        witness = problems.smp_decide_bounded(inst.platform, inst.elements, inst.target, bound)
        if witness is None:
            print("witness: absent")
        else:
            print("witness: " + (",".join(str(i + 1) for i in witness) if witness else "e"))
    elif args.problem == "gpcp":
        term = problems.gpcp_bounded_search(inst.u, inst.v, inst.a, inst.b, bound)
        print("term: " + (serialize_word(term) if term is not None else "absent"))
    elif args.problem == "twisted":
        platform = FreePlatform(inst.rank)
        w = problems.twisted_conjugacy_bounded(
            platform.element(inst.source),
            platform.element(inst.target_word),
            inst.phi,
            inst.psi,
            bound,
        )
        print("witness: " + (serialize_word(w) if w is not None else "absent"))
    else:  # factor
        result = problems.factorization_decide_bounded(
            inst.target, inst.agens, inst.bgens, bound
        )
        if result is None:
            print("witness: absent")
        else:
            print(f"a-expr: {serialize_word(result[0])}")
            print(f"b-expr: {serialize_word(result[1])}")
    return 0


# ---------------------------------------------------------------------------
# parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gtc", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a seeded protocol session")
    sim.add_argument("--protocol", required=True, choices=protocols.PROTOCOLS)
    sim.add_argument("--platform", choices=["matrix", "direct", "free", "cyclic"],
                     default=None)
    sim.add_argument("--p", type=int, default=None)
    sim.add_argument("--g", type=int, default=None)
    sim.add_argument("--n", type=int, default=None)
    sim.add_argument("--rank", type=int, default=None)
    sim.add_argument("--min-len", type=int, default=8)
    sim.add_argument("--max-len", type=int, default=16)
    sim.add_argument("--seed", type=int, default=None)
    sim.add_argument("--out", default=None)
    sim.set_defaults(func=cmd_simulate)

    atk = sub.add_parser("attack", help="run an attack against a transcript file")
    atk.add_argument("--transcript", required=True)
    atk.add_argument("--method", required=True, choices=sorted(attacks.ATTACK_DRIVERS))
    atk.add_argument("--bound", type=int, default=1000)
    atk.add_argument("--out", default=None)
    atk.set_defaults(func=cmd_attack)

    pe = sub.add_parser("paper-examples", help="replay the worked examples "
                        "against the embedded golden values")
    pe.set_defaults(func=cmd_paper_examples)

    mc = sub.add_parser("montecarlo", help="trick-and-treat trial statistics")
    mc.add_argument("--trials", type=int, required=True)
    mc.add_argument("--min-len", type=int, default=16)
    mc.add_argument("--max-len", type=int, default=24)
    mc.add_argument("--seed", type=int, default=None)
    mc.add_argument("--out", default=None)
    mc.set_defaults(func=cmd_montecarlo)

    wp = sub.add_parser("wp-encrypt", help="word-problem bit encryption")
    wp.add_argument("action", choices=["keygen", "encrypt", "decrypt", "attack"])
    wp.add_argument("--rank", type=int, default=2)
    wp.add_argument("--chain-len", type=int, default=6)
    wp.add_argument("--bit", type=int, choices=[0, 1], default=1)
    wp.add_argument("--min-len", type=int, default=16)
    wp.add_argument("--max-len", type=int, default=24)
    wp.add_argument("--pub", default=None)
    wp.add_argument("--priv", default=None)
    wp.add_argument("--ct", default=None)
    wp.add_argument("--out", default=None)
    wp.add_argument("--out-pub", default=None)
    wp.add_argument("--out-priv", default=None)
    wp.add_argument("--seed", type=int, default=None)
    wp.set_defaults(func=cmd_wp_encrypt)

    hom = sub.add_parser("hom", help="homomorphic encryption over presentations")
    hom.add_argument("action", choices=["keygen", "encrypt", "decrypt"])
    hom.add_argument("--group", choices=["demo", "a5"], default="demo")
    hom.add_argument("--chain-len", type=int, default=8)
    hom.add_argument("--discard", type=int, default=1)
    hom.add_argument("--word", default="1,2")
    hom.add_argument("--steps", type=int, default=4)
    hom.add_argument("--pub", default=None)
    hom.add_argument("--priv", default=None)
    hom.add_argument("--ct", default=None)
    hom.add_argument("--out", default=None)
    hom.add_argument("--out-pub", default=None)
    hom.add_argument("--out-priv", default=None)
    hom.add_argument("--seed", type=int, default=None)
    hom.set_defaults(func=cmd_hom)

    solve = sub.add_parser("solve", help="bounded deciders")
    solve.add_argument("problem", choices=["ssp", "kp", "smp", "gpcp", "twisted", "factor"])
    solve.add_argument("--instance", required=True)
    solve.add_argument("--bound", type=int, default=None)
    solve.set_defaults(func=cmd_solve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (GtcError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
