import json

import pytest

import charstrat


def test_crit_codim():
    assert charstrat.crit_codim(2, 2, 1) == 1
    assert charstrat.crit_codim(2, 2, 9) is None


def test_minimize_agrees_with_brute_force():
    r = charstrat.minimize(4, 2, 1, "plus")
    assert r["closed_form"] == 3
    assert r["brute_force"] == 3
    assert r["agree"]


def test_census_counts_every_point():
    counts = charstrat.census("F2", 2, 2, 1)
    assert counts[(0, 0)] == 4
    assert sum(counts.values()) == 8


def test_estimate_codim():
    r = charstrat.estimate_codim(2, 2, 1, 1, 1, samples=100000)
    assert r["formula_codim"] == 1
    assert abs(r["estimate"] - 1) < 0.35


def test_milnor():
    r = charstrat.milnor("x0^3 + x1^4")
    assert r["certified"] and r["mu"] == 6
    assert not charstrat.milnor("x0^3 + x1^4", field="F3")["certified"]


def test_morse_char2():
    r = charstrat.morse("x0*x1 + x0^3 + x1^4", field="F2", trunc=6)
    assert r["q"] == "x0*x1"
    assert r["verified"]


def test_corank1_normal_form():
    r = charstrat.corank1_normal_form("x0; x1^2 + x2^3 + x0*x2", field="F2", point=["0", "0", "0"])
    assert r["verified"]
    assert r["j"] == 2


def test_classify():
    r = charstrat.classify("x0^2; x0*x1", field="F5", point=["0", "0"])
    assert r["corank"] == 2
    assert "symbol" in r


def test_errors():
    with pytest.raises(charstrat.CharstratError):
        charstrat.milnor("x0", field="F6")
    with pytest.raises(ValueError):
        charstrat.delta_codim(1, 1, 1, 0, 0, sym="skew")


def test_cli_roundtrip():
    code, out, _ = charstrat.run_cli(["codim", "--crit", "2", "2", "1"])
    assert code == 0
    doc = json.loads(out)
    assert doc["schema"] == "charstrat/1"
    assert doc["result"] == {"params": [2, 2, 1], "nonempty": True, "codim": 1}
    assert charstrat.run_cli(["codim", "--crit", "2"])[0] == 2
