import hashlib

import pytest

from gtc.cli import main


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_simulate_dh(tmp_path, capsys):
    out_file = tmp_path / "dh.txt"
    code, out, _ = run(
        ["simulate", "--protocol", "dh", "--p", "23", "--g", "5", "--seed", "1",
         "--out", str(out_file)],
        capsys,
    )
    assert code == 0
    assert "keys-equal=true" in out
    assert "records=2" in out
    text = out_file.read_text()
    assert text.startswith("# protocol: dh\n# platform: cyclic 23 5\n")
    assert len([ln for ln in text.splitlines() if not ln.startswith("#")]) == 2


def test_simulate_semidirect_matrix(tmp_path, capsys):
    out_file = tmp_path / "sd.txt"
    code, out, _ = run(
        ["simulate", "--protocol", "semidirect", "--platform", "matrix",
         "--n", "3", "--p", "1009", "--seed", "1", "--out", str(out_file)],
        capsys,
    )
    assert code == 0
    assert "keys-equal=true" in out


def test_simulate_every_protocol(tmp_path, capsys):
    for protocol in ("dh", "elgamal", "ko-lee", "aag", "decomp", "twisted",
                     "centralizer", "commutative", "factor", "semidirect"):
        out_file = tmp_path / f"{protocol}.txt"
        code, out, _ = run(
            ["simulate", "--protocol", protocol, "--seed", "3", "--out", str(out_file)],
            capsys,
        )
        assert code == 0, protocol
        assert "keys-equal=true" in out, protocol


def test_unknown_protocol_exits_2(capsys):
    with pytest.raises(SystemExit) as err:
        main(["simulate", "--protocol", "nope"])
    assert err.value.code == 2


def test_invalid_protocol_platform_combination_exits_2(capsys):
    code, _, err = run(
        ["simulate", "--protocol", "dh", "--platform", "matrix"], capsys
    )
    assert code == 2
    assert "does not run" in err
    code, _, _ = run(
        ["simulate", "--protocol", "centralizer", "--platform", "direct"], capsys
    )
    assert code == 2


def test_attack_roundtrip(tmp_path, capsys):
    transcript = tmp_path / "dh.txt"
    run(["simulate", "--protocol", "dh", "--p", "23", "--g", "5", "--seed", "2",
         "--out", str(transcript)], capsys)
    report = tmp_path / "report.txt"
    code, out, _ = run(
        ["attack", "--transcript", str(transcript), "--method", "dlog",
         "--bound", "50", "--out", str(report)],
        capsys,
    )
    assert code == 0
    assert "success=true" in out
    assert report.read_text().startswith("attack: dlog\nsuccess: true\n")


def test_attack_normal_on_direct_and_block(tmp_path, capsys):
    direct = tmp_path / "direct.txt"
    run(["simulate", "--protocol", "decomp", "--platform", "direct", "--seed", "5",
         "--out", str(direct)], capsys)
    code, out, _ = run(
        ["attack", "--transcript", str(direct), "--method", "normal"], capsys
    )
    assert code == 0
    assert "success: true" in out
    block = tmp_path / "block.txt"
    run(["simulate", "--protocol", "decomp", "--platform", "matrix", "--seed", "5",
         "--out", str(block)], capsys)
    code, out, _ = run(
        ["attack", "--transcript", str(block), "--method", "normal"], capsys
    )
    assert code == 0
    assert "success: false" in out


def test_attack_missing_file_exits_2(tmp_path, capsys):
    code, _, err = run(
        ["attack", "--transcript", str(tmp_path / "missing.txt"), "--method", "dlog"],
        capsys,
    )
    assert code == 2
    assert "cannot read transcript" in err


def test_attack_garbage_file_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("not a transcript\n")
    code, _, err = run(
        ["attack", "--transcript", str(bad), "--method", "dlog"], capsys
    )
    assert code == 2


def test_paper_examples_passes(capsys):
    code, out, _ = run(["paper-examples"], capsys)
    assert code == 0
    assert "all golden values match" in out
    assert "map: 1 -> 5" in out
    assert "ciphertext: 5,5,-4,5,4,2,-6,2" in out


def test_montecarlo_single_trial(tmp_path, capsys):
    code, out, _ = run(["montecarlo", "--trials", "1", "--seed", "1"], capsys)
    assert code == 0
    assert "trials: 1" in out


def test_montecarlo_stats_file(tmp_path, capsys):
    stats = tmp_path / "stats.txt"
    code, out, _ = run(
        ["montecarlo", "--trials", "200", "--seed", "9", "--out", str(stats)],
        capsys,
    )
    assert code == 0
    text = stats.read_text()
    assert "eve-accuracy:" in text and "case-1:" in text


def test_wp_encrypt_lifecycle(tmp_path, capsys):
    pub = tmp_path / "pub.txt"
    priv = tmp_path / "priv.txt"
    ct = tmp_path / "ct.txt"
    code, _, _ = run(
        ["wp-encrypt", "keygen", "--seed", "4", "--out-pub", str(pub),
         "--out-priv", str(priv)],
        capsys,
    )
    assert code == 0
    for bit in ("0", "1"):
        code, _, _ = run(
            ["wp-encrypt", "encrypt", "--bit", bit, "--pub", str(pub),
             "--seed", "5", "--out", str(ct)],
            capsys,
        )
        assert code == 0
        code, out, _ = run(
            ["wp-encrypt", "decrypt", "--ct", str(ct), "--priv", str(priv)], capsys
        )
        assert code == 0
        assert out.strip() == f"bit: {bit}"
        code, out, _ = run(
            ["wp-encrypt", "attack", "--ct", str(ct), "--priv", str(priv),
             "--seed", "6"],
            capsys,
        )
        assert code == 0
        assert out.startswith("guess:")


def test_hom_lifecycle(tmp_path, capsys):
    pub = tmp_path / "pub.txt"
    priv = tmp_path / "priv.txt"
    ct = tmp_path / "ct.txt"
    code, _, _ = run(
        ["hom", "keygen", "--seed", "3", "--out-pub", str(pub), "--out-priv", str(priv)],
        capsys,
    )
    assert code == 0
    code, _, _ = run(
        ["hom", "encrypt", "--pub", str(pub), "--word", "1,2", "--steps", "4",
         "--seed", "8", "--out", str(ct)],
        capsys,
    )
    assert code == 0
    code, out, _ = run(
        ["hom", "decrypt", "--pub", str(pub), "--priv", str(priv), "--ct", str(ct)],
        capsys,
    )
    assert code == 0
    assert out.strip() == "plaintext: 2 3 4 5 1"


def test_solve_commands(tmp_path, capsys):
    ssp = tmp_path / "ssp.txt"
    ssp.write_text(
        "problem: ssp\nplatform: free 1\nelem: 1,1,1\nelem: 1,1\n"
        "target: 1,1,1,1,1\nbound: 1\n"
    )
    code, out, _ = run(["solve", "ssp", "--instance", str(ssp)], capsys)
    assert code == 0
    assert out.strip() == "witness: 1,1"

    gp = tmp_path / "gpcp.txt"
    gp.write_text(
        "problem: gpcp\nrank: 2\nu: 1\nv: 2\na: 1,2\nb: 1,2\nbound: 2\n"
    )
    code, out, _ = run(["solve", "gpcp", "--instance", str(gp)], capsys)
    assert code == 0
    assert out.strip() == "term: e"

    factor = tmp_path / "factor.txt"
    factor.write_text(
        "problem: factor\nplatform: direct 1 1\nagens: 1|e\nbgens: e|1\n"
        "target: 1,1|1\nbound: 3\n"
    )
    code, out, _ = run(["solve", "factor", "--instance", str(factor)], capsys)
    assert code == 0
    assert "a-expr: 1,1" in out and "b-expr: 1" in out

    code, _, err = run(["solve", "kp", "--instance", str(ssp)], capsys)
    assert code == 2


def test_cli_outputs_are_deterministic(tmp_path, capsys):
    digests = []
    for run_dir in ("one", "two"):
        d = tmp_path / run_dir
        d.mkdir()
        files = []
        for protocol in ("dh", "decomp", "semidirect"):
            f = d / f"{protocol}.txt"
            run(["simulate", "--protocol", protocol, "--seed", "11", "--out", str(f)],
                capsys)
            files.append(f)
        stats = d / "mc.txt"
        run(["montecarlo", "--trials", "50", "--seed", "11", "--out", str(stats)],
            capsys)
        files.append(stats)
        h = hashlib.sha256()
        for f in files:
            h.update(f.read_bytes())
        digests.append(h.hexdigest())
    assert digests[0] == digests[1]


def test_seed_env_default(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("GTC_SEED", "77")
    f1 = tmp_path / "a.txt"
    f2 = tmp_path / "b.txt"
    run(["simulate", "--protocol", "dh", "--out", str(f1)], capsys)
    run(["simulate", "--protocol", "dh", "--seed", "77", "--out", str(f2)], capsys)
    assert f1.read_bytes() == f2.read_bytes()
