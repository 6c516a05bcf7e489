import json
import random
from fractions import Fraction

import pytest

from sppc.adversary import make_adversary
from sppc.cli import main
from sppc.errors import ConfigurationError
from sppc.field import FieldContext
from sppc.metrics import expected_rate_ppc, expected_rate_secrecy, expected_upload, fmt_rational, measure
from sppc.mvpoly import from_text
from sppc.params import derive_params
from sppc.protocol import run_protocol
from sppc.simulate import SimConfig, bench, bundled_config, simulate
from sppc.storage import random_fileset


def test_random_adversary_sets_are_disjoint_and_full():
    p = derive_params(21, 4, 2, 2, 1, 1, 2, q=29)
    plan = make_adversary("random", p, seed=3)
    for s in range(1, p.S + 1):
        rf = plan.faults(s)
        assert len(rf.byzantine) == 1 and len(rf.unresponsive) == 1
        assert not rf.byzantine & rf.unresponsive
    none = make_adversary("none", p)
    assert all(not none.faults(s).byzantine and not none.faults(s).unresponsive for s in range(1, p.S + 1))


def test_forged_answers_differ_from_authentic():
    p = derive_params(21, 4, 2, 2, 1, 1, 2, q=29)
    f = FieldContext(29)
    plan = make_adversary("fixed", p, byzantine=[5])
    rng = random.Random(0)
    for authentic in list(range(29)) * 20:
        assert plan.tamper(f, 1, 5, authentic, rng) != authentic
        assert plan.tamper(f, 1, 6, authentic, rng) == authentic


def test_unknown_adversary_kind():
    p = derive_params(21, 4, 2, 2, 1, 1, 2, q=29)
    with pytest.raises(ConfigurationError):
        make_adversary("sneaky", p)


def test_worked_example_metrics(ex3d):
    m, tr, verdict = simulate(ex3d)
    assert verdict.ok and verdict.correct
    assert m.rate_ppc == Fraction(3, 10)
    assert m.rate_secrecy == 2
    assert m.upload_symbols == 252 == 2 * 21 * 3 * 2
    assert m.download_symbols == 40
    assert set(m.field_ops) == {"storage", "query", "server", "decode"}


def test_degraded_rate_is_e_over_n():
    p = derive_params(9, 3, 0, 1, 0, 0, 2, P=1, M=2)
    assert p.E == p.N - (p.G * (p.K - 1) + 1)
    cs = [from_text("2,0:1 0,1:1", 2, p.q)]
    f = FieldContext(p.q)
    _, tr = run_protocol(1, random_fileset(f, p, random.Random(1)), cs, p, seed=1)
    m = measure(tr)
    assert m.rate_ppc == Fraction(p.E, p.N)


def test_silent_servers_change_download_only():
    p = derive_params(21, 4, 2, 2, 1, 1, 2, P=2, M=2, q=29)
    cs = [from_text(c, 2, 29) for c in ("2,0:1 1,1:3 0,1:2", "0,2:5 1,0:1")]
    f = FieldContext(29)
    files = random_fileset(f, p, random.Random(2))
    _, tr = run_protocol(1, files, cs, p, make_adversary("none", p), seed=2)
    m = measure(tr)
    assert m.download_symbols == 42
    assert m.rate_ppc == Fraction(12, 42) != expected_rate_ppc(p)
    assert m.rate_secrecy == expected_rate_secrecy(p)
    assert m.upload_symbols == expected_upload(p.with_span(2))


def test_fmt_rational():
    assert fmt_rational(Fraction(3, 10)) == "3/10 (0.300000)"


def test_config_errors():
    raw = json.loads(bundled_config("example_3d").read_text())
    with pytest.raises(ConfigurationError, match="unknown"):
        SimConfig.from_dict(dict(raw, bogus=1))
    with pytest.raises(ConfigurationError, match="missing"):
        SimConfig.from_dict({k: v for k, v in raw.items() if k != "N"})
    with pytest.raises(ConfigurationError, match="theta"):
        SimConfig.from_dict(dict(raw, theta=3))
    with pytest.raises(ConfigurationError):
        SimConfig.from_dict(dict(raw, candidates=["2,0:1 1,1:x"]))
    with pytest.raises(ConfigurationError):
        SimConfig.from_dict(dict(raw, files=[[[1, 2]]]))


def test_inline_files_are_used():
    raw = json.loads(bundled_config("tiny_audit.json").read_text())
    raw["files"] = [[[1], [2], [3]], [[4], [5], [6]]]
    m, tr, verdict = simulate(SimConfig.from_dict(raw))
    assert verdict.ok
    decoded = [r.payload for r in tr.records if r.direction == "decoded"]
    assert decoded == ["1,1:1 2,1:2 3,1:3"]


def test_bench_table():
    grid = {"base": {"K": 2, "X": 1, "T": 1, "B": 0, "U": 1, "G": 1, "M": 2,
                     "candidates": ["1,0:1", "0,1:2"], "adversary": {"kind": "random"}},
            "sweep": {"N": [4, 6, 8, 10]}}
    rows, skipped = bench(grid, seed=0, workers=2)
    assert skipped == 1
    assert [r.params.N for r in rows] == [6, 8, 10]
    assert all(r.verdict.ok for r in rows)


def test_cli_run(capsys, tmp_path):
    out = tmp_path / "t.txt"
    assert main(["run", "--config", "example_3d", "--transcript", str(out)]) == 0
    text = capsys.readouterr().out
    assert "rate_ppc: 3/10 (0.300000)" in text
    assert "verdict: correct" in text
    assert out.read_text().startswith("# sppc transcript")


def test_cli_is_deterministic(capsys, tmp_path):
    reports, transcripts = [], []
    for i in range(2):
        t = tmp_path / f"t{i}.txt"
        assert main(["run", "--config", "example_3d", "--seed", "11", "--transcript", str(t)]) == 0
        reports.append(capsys.readouterr().out)
        transcripts.append(t.read_bytes())
    assert reports[0] == reports[1]
    assert transcripts[0] == transcripts[1]


def test_cli_audit(capsys):
    assert main(["audit", "--config", "tiny_audit"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert [ln.split()[0] for ln in lines[1:]] == ["PASS", "PASS", "PASS"]


def test_cli_setup(capsys, tmp_path):
    out = tmp_path / "pts.txt"
    assert main(["setup", "--config", "example_3d", "--out", str(out)]) == 0
    assert out.read_text().splitlines()[0] == "29 21 4 2 3 2 2"
    assert main(["setup", "--config", "example_3d", "--set", "N=10"]) == 2
    assert "infeasible" in capsys.readouterr().err


def test_cli_bad_config_paths(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["run", "--config", str(bad)]) == 2
    assert main(["run", "--config", "no_such_config"]) == 2
    assert "configuration error" in capsys.readouterr().err


def test_cli_bench(capsys, tmp_path):
    grid = tmp_path / "g.json"
    grid.write_text(json.dumps({"points": [
        {"N": 8, "K": 2, "X": 0, "T": 1, "B": 1, "U": 1, "G": 1, "M": 1, "candidates": ["1:1"]}]}))
    assert main(["bench", "--grid", str(grid), "--workers", "1"]) == 0
    out = capsys.readouterr().out
    assert "rate_ppc" in out and "1 feasible points" in out
