import json
import os

import jsonschema
import pytest

from psu38.harness import (REPORT_SCHEMA, VerifyContext, build_claims,
                           factorization, format_report, main, run_claims)

from conftest import CACHE_DIR


def test_claim_ids_unique_and_cover_manifest():
    claims = build_claims()
    ids = [c.id for c in claims]
    assert len(ids) == len(set(ids))
    # every lemma/theorem family the catalog promises has at least one claim
    for prefix in ("L3.1", "L3.2", "L3.3", "L3.4", "L3.5", "L3.6", "P3.7",
                   "L3.8", "L3.9", "L3.10.partial", "L3.11", "T1.1", "T1.2",
                   "NS."):
        assert any(i.startswith(prefix) for i in ids), prefix


def test_factorization():
    assert factorization(25536) == {2: 6, 3: 1, 7: 1, 19: 1}
    assert factorization(34048) == {2: 8, 7: 1, 19: 1}
    assert factorization(33094656) == {2: 10, 3: 5, 7: 1, 19: 1}


def test_group_filtering(ctx):
    rep = run_claims(ctx, group="H", claim_filter="L3.8,L3.11.i.1")
    ids = [c["id"] for c in rep["claims"]]
    assert "L3.11.i.1" in ids
    assert all(not i.startswith("L3.8") for i in ids)  # L3.8 is K-only


def test_claim_filter_prefix(ctx):
    rep = run_claims(ctx, claim_filter="L3.1")
    ids = [c["id"] for c in rep["claims"]]
    assert set(ids) == {"L3.1.i", "L3.1.ii", "L3.1.iii", "L3.1.iv"}
    assert rep["overall"]


def test_report_schema(ctx):
    rep = run_claims(ctx, claim_filter="FLD,SU,CONV,RG,AMB")
    jsonschema.validate(rep, REPORT_SCHEMA)
    assert any(c["verdict"] == "info" for c in rep["claims"])
    text = format_report(rep)
    assert "OVERALL: PASS" in text


def _strip_times(rep):
    rep = json.loads(json.dumps(rep, sort_keys=True))
    rep.pop("total_seconds", None)
    for c in rep["claims"]:
        c.pop("seconds", None)
    return rep


def test_report_determinism_across_fresh_contexts():
    a = VerifyContext(cache_dir=CACHE_DIR)
    b = VerifyContext(cache_dir=CACHE_DIR)
    fa = "FLD,SU,CONV,L3.1,L3.2,L3.4,P3.7.ii,L3.10.partial"
    ra = _strip_times(run_claims(a, claim_filter=fa))
    rb = _strip_times(run_claims(b, claim_filter=fa))
    assert json.dumps(ra, sort_keys=True) == json.dumps(rb, sort_keys=True)


def test_cli_field_table(capsys):
    assert main(["field-table"]) == 0
    out = capsys.readouterr().out
    assert len(out.strip().splitlines()) == 64  # header + 63 entries


def test_cli_bad_modulus(capsys):
    assert main(["verify", "--modulus", "0b1000001"]) == 2
    assert main(["build", "--modulus", "0b1111"]) == 2


def test_cli_verify_subset(capsys):
    rc = main(["verify", "--claims", "FLD,SU", "--cache-dir", CACHE_DIR])
    assert rc == 0
    out = capsys.readouterr().out
    assert "[PASS] FLD.1" in out and "OVERALL: PASS" in out


def test_cli_verify_json_out(tmp_path, capsys):
    out_path = str(tmp_path / "report.json")
    rc = main(["verify", "--claims", "CONV", "--json", "--out", out_path,
               "--cache-dir", CACHE_DIR])
    assert rc == 0
    with open(out_path) as fh:
        rep = json.load(fh)
    jsonschema.validate(rep, REPORT_SCHEMA)
    printed = json.loads(capsys.readouterr().out)
    assert printed["overall"] is True


def test_cli_build_uses_cache(capsys):
    rc = main(["build", "--cache-dir", CACHE_DIR])
    assert rc == 0
    assert "25536 + 34048" in capsys.readouterr().out


def test_cli_arcs(capsys, graph):
    rc = main(["arcs", "--side", "2", "--s", "5", "--group", "K",
               "--cache-dir", CACHE_DIR])
    assert rc == 0
    out = capsys.readouterr().out
    assert "108 arcs, 1 orbits" in out


def test_cli_arcs_csv(tmp_path, capsys, graph):
    path = str(tmp_path / "orbits.csv")
    rc = main(["arcs", "--side", "1", "--s", "6", "--group", "K",
               "--out", path, "--cache-dir", CACHE_DIR])
    assert rc == 0
    with open(path) as fh:
        lines = fh.read().splitlines()
    assert lines[0].startswith("side,s,group")
    assert lines[1].startswith("1,6,K,288,2")


def test_cli_export_edge_list(tmp_path, capsys, graph):
    path = str(tmp_path / "edges.txt")
    rc = main(["export", "--format", "edge-list", "--out", path,
               "--cache-dir", CACHE_DIR])
    assert rc == 0
    with open(path) as fh:
        assert sum(1 for _ in fh) == 102144


def test_cli_no_rebuild_missing_cache(tmp_path):
    rc = main(["verify", "--no-rebuild", "--cache-dir", str(tmp_path / "none"),
               "--claims", "FLD"])
    assert rc == 3


def test_env_cache_dir(monkeypatch, tmp_path):
    monkeypatch.setenv("AMALGAM_CACHE_DIR", str(tmp_path))
    ctx = VerifyContext()
    assert ctx.cache_dir == str(tmp_path)


def test_exit_code_1_on_claim_failure(monkeypatch, capsys):
    import psu38.harness as hz

    def fake_claims():
        return [hz.Claim("X.1", "always fails", ("H", "K"),
                         lambda ctx: (False, {"why": "forced"}))]

    monkeypatch.setattr(hz, "build_claims", fake_claims)
    rc = main(["verify", "--claims", "X", "--cache-dir", CACHE_DIR])
    assert rc == 1
    assert "OVERALL: FAIL" in capsys.readouterr().out


def test_claim_exception_becomes_failure(monkeypatch):
    import psu38.harness as hz

    def boom(ctx):
        raise RuntimeError("broken claim")

    def fake_claims():
        return [hz.Claim("X.2", "raises", ("H", "K"), boom)]

    monkeypatch.setattr(hz, "build_claims", fake_claims)
    ctx = VerifyContext(cache_dir=CACHE_DIR)
    rep = run_claims(ctx)
    assert rep["claims"][0]["verdict"] == "fail"
    assert "broken claim" in rep["claims"][0]["witness"]["error"]
