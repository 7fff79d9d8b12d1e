from __future__ import annotations

import json

import pytest

from gausslat import cli


def _run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def test_parser_accepts_flags_after_subcommand():
    args = cli.build_parser().parse_args(["verify-lattices", "--out", "r.json", "--threads", "2", "--samples", "10"])
    assert args.out == "r.json" and args.threads == 2 and args.samples == 10


def test_usage_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["no-such-command"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        cli.main(["diagram", "--threads", "0"])
    assert exc.value.code == 2


def test_verify_lattices_report(tmp_path, sv_cache, monkeypatch):
    monkeypatch.delenv("GAUSSLAT_CACHE", raising=False)
    out = tmp_path / "r.json"
    code = cli.main(["verify-lattices", "--samples", "200", "--cache-dir", str(sv_cache.root), "--out", str(out)])
    assert code == 0
    rep = json.loads(out.read_text())
    assert rep["schema_version"] == cli.SCHEMA_VERSION
    assert rep["command"] == "verify-lattices" and rep["ok"]
    res = rep["results"]
    assert res["bw16_kissing"] == 4320 and res["bw16_norm2"] == 0
    assert res["covering"]["failures"] == 0
    assert set(rep["inputs"]) == {"simple_roots", "bw16_basis"}


def test_corrupted_cache_sets_warning(tmp_path, capsys, monkeypatch):
    from gausslat import shortvec

    cache = tmp_path / "cache"
    monkeypatch.setenv("GAUSSLAT_CACHE", str(cache))
    shortvec._SHELLS.clear()
    code, rep = _run(["verify-lattices", "--samples", "50"], capsys)
    assert code == 0 and "warnings" not in rep
    target = cache / "shortvec_BW16G_4_1.json"
    assert target.exists()
    target.write_text("{not json")
    shortvec._SHELLS.clear()
    code, rep = _run(["verify-lattices", "--samples", "50"], capsys)
    assert code == 0
    assert any("corrupted" in w for w in rep["warnings"])
    assert rep["results"]["bw16_kissing"] == 4320


def test_diagram_with_dot(tmp_path, capsys):
    dot = tmp_path / "d.dot"
    code, rep = _run(["diagram", "--dot", str(dot)], capsys)
    assert code == 0 and rep["ok"]
    res = rep["results"]
    assert res["Q_order"] == 43008 and res["relations"]["pairs"] == 496
    assert dot.read_text().startswith("graph D {")


def test_failed_verification_exits_1(tmp_path, capsys, sv_cache):
    bogus = tmp_path / "paths.jsonl"
    bogus.write_text('{"id":"S0:0","via":"direct","word":[1]}\n')
    code, rep = _run(["generate", "--cache-dir", str(sv_cache.root), "--verify-paths", str(bogus)], capsys)
    assert code == 1 and not rep["ok"]
    assert rep["results"]["verify"]["all_verified"] is False
    assert "generation" not in rep["results"]


def test_json_encoder():
    from fractions import Fraction

    from gausslat.scalar import GaussInt, RealQuad

    assert cli._jsonable(Fraction(1, 3)) == [1, 3]
    assert cli._jsonable(GaussInt(1, -2)) == [1, -2]
    assert cli._jsonable(RealQuad(0, Fraction(1, 8)))["b"] == [1, 8]
    with pytest.raises(TypeError):
        cli._jsonable(object())
