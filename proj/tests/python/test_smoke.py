import math

import pytest

import hgtpp

SPEC = "name = toy\nnodes = 6\nhorizon = 60\nedges = 0,1,2; 3,4; 1,5\n"


def test_registry():
    names = hgtpp.model_names()
    assert len(names) == 11
    assert "HGDHE" in names and "HGBDHE" in names


def test_closed_forms():
    assert hgtpp.rayleigh_expected_duration(math.pi / 2) == pytest.approx(1.0)
    assert hgtpp.survival_constant(2.0, 0.0, 0.5) == pytest.approx(math.exp(-1.0))
    assert hgtpp.survival_rayleigh(2.0, 1.0, 2.0) == pytest.approx(math.exp(-1.0))
    assert hgtpp.clique_decompose([3, 1, 2]) == [(1, 2), (1, 3), (2, 3)]


def test_synthetic_and_round_trip(tmp_path):
    d = hgtpp.generate_synthetic(SPEC, seed=4)
    assert len(d) > 100
    assert d.num_left == 6
    times = [e[0] for e in d.events]
    assert times == sorted(times)
    prefix = hgtpp.write_simplex_corpus(d, tmp_path, "toy")
    assert prefix.name == "toy"
    back = hgtpp.load_dataset(tmp_path)
    assert back.events == d.events
    assert back.stats()["events"] == len(d)
    scaled = hgtpp.scale_times(d)
    assert scaled.time_scale > 0


def test_errors(tmp_path):
    with pytest.raises(hgtpp.SpecError):
        hgtpp.generate_synthetic("nodes = x\n")
    (tmp_path / "bad.tsv").write_text("1.0\t1\n")
    with pytest.raises(hgtpp.ParseError):
        hgtpp.load_dataset(tmp_path / "bad.tsv", bipartite=True)
    d = hgtpp.generate_synthetic(SPEC, seed=1)
    with pytest.raises(hgtpp.UnknownModelError):
        hgtpp.fit_and_evaluate(d, model="nope")


def test_fit_and_evaluate():
    d = hgtpp.scale_times(hgtpp.generate_synthetic(SPEC, seed=2))
    r = hgtpp.fit_and_evaluate(d, model="DHE", d=4, epochs=2, segment=32, negatives=4, mc_samples=4, seed=1)
    assert 0.0 < r["mrr"] <= 1.0
    assert r["mae"] >= 0.0
    assert len(r["trace"]) == 2
    assert sum(b["events"] for b in r["buckets"]) == r["events"]


def test_cli(tmp_path):
    spec = tmp_path / "toy.spec"
    spec.write_text(SPEC)
    code, out, _ = hgtpp.run_cli(["simulate", "--spec", str(spec), "--out", str(tmp_path / "data")])
    assert code == 0
    code, out, _ = hgtpp.run_cli(["stats", "--data", str(tmp_path / "data")])
    assert code == 0 and "toy" in out
    code, _, err = hgtpp.run_cli(["train", "--data", str(tmp_path / "data"), "--model", "NOPE"])
    assert code == 2 and "error" in err
