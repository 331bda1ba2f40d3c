import math

import numpy as np
import pytest

from negbern import catalog
from negbern.catalog import polylog_recursion, polylog_series
from negbern.representation import evaluate_complex, evaluate_real, shift_normalize

STANDARD_S = -np.geomspace(8.0, 0.05, 16)


def test_examples():
    assert catalog.get("log", b=1)(-1.0) == pytest.approx(-math.log(2), abs=1e-15)
    assert catalog.get("log", b=1)(-1.0) == catalog.get("polylog", p=1)(-1.0)
    assert catalog.get("power", alpha=0.5, c=0)(-4.0) == pytest.approx(-2.0, abs=1e-15)
    assert catalog.get("arch", b=1)(-1.0) == pytest.approx(-math.acosh(2), abs=1e-15)


@pytest.mark.parametrize(
    "name, params",
    [
        ("power", dict(alpha=1.0)),
        ("power", dict(alpha=0.5, c=-1.0)),
        ("log", dict(b=0.5)),
        ("arch", dict(b=0.9)),
        ("polylog", dict(p=0)),
        ("polylog", dict(p=1.5)),
        ("example2", dict(b=0.5)),
        ("power", dict(beta=0.5)),
    ],
)
def test_out_of_range(name, params):
    with pytest.raises(ValueError):
        catalog.get(name, **params)


def test_unknown_entry():
    with pytest.raises(KeyError):
        catalog.get("zeta")
    assert catalog.names() == ["arch", "example2", "log", "polylog", "power"]


def test_closed_forms_match_oracles(oracles):
    for row in oracles["tempered_power"]:
        assert catalog.power(row["alpha"], row["c"])(row["s"]) == pytest.approx(row["value"], rel=1e-13, abs=1e-15)
    for row in oracles["log_arch"]:
        assert catalog.log(row["b"])(row["s"]) == pytest.approx(row["log"], rel=1e-13, abs=1e-15)
        assert catalog.arch(row["b"])(row["s"]) == pytest.approx(row["arch"], rel=1e-13, abs=1e-15)


@pytest.mark.parametrize("entry", [e for e in catalog.standard_entries() if e.triple is not None and e.arity == 1], ids=lambda e: f"{e.name}{e.params}")
def test_triple_agrees_with_closed_form(entry):
    for s in STANDARD_S:
        assert evaluate_real(entry.triple, [s]) == pytest.approx(entry(s), abs=1e-6)
    z = -1.5 + 2.0j
    assert abs(evaluate_complex(entry.triple, [z]) - entry(z)) < 1e-6


def test_which_entries_carry_triples():
    has = {(e.name, tuple(e.params.items())): e.triple is not None for e in catalog.standard_entries()}
    assert has[("arch", (("b", 1.0),))] is False
    assert has[("polylog", (("p", 2),))] is False
    assert has[("polylog", (("p", 1),))] is True
    assert has[("example2", (("b", 2.0),))] is True


def test_polylog_against_mpmath(oracles):
    for row in oracles["polylog"]:
        h = catalog.polylog(row["p"]).handle
        z = complex(*row["z"])
        want = complex(*row["value"])
        got = h(z) if z.imag else h(z.real)
        assert abs(got - want) <= 2e-13 * max(1.0, abs(want)), (row, got)


def test_polylog_known_values(oracles):
    assert catalog.polylog(2)(-1.0) == pytest.approx(-math.pi**2 / 12, abs=1e-14)
    assert catalog.polylog(2)(-1.0) == pytest.approx(oracles["li2_minus1"], abs=1e-14)
    assert catalog.polylog(3)(-1.0) == pytest.approx(oracles["li3_minus1"], abs=1e-14)


@pytest.mark.parametrize("p", [1, 2, 3, 4])
def test_polylog_vanishes_at_origin(p):
    assert abs(catalog.polylog(p)(-1e-12)) < 2e-12


@pytest.mark.parametrize("p", [2, 3, 4])
def test_series_and_recursion_agree_inside_disk(p):
    z = np.array([-0.99, -0.7, -0.45, -0.1, 0.3 + 0.4j, -0.6 - 0.6j])
    np.testing.assert_allclose(polylog_recursion(p, z), polylog_series(p, z), atol=1e-12)
    assert catalog.polylog(p).routes["series_gap"] < 1e-6


def test_example2(oracles):
    e = catalog.example2(2.0)
    assert e(-1.0, -2.0) == pytest.approx(oracles["example2_b2_anchor"], abs=1e-14)
    assert e(-1.0, -1.0) == pytest.approx(-1 / 6, abs=1e-14)
    assert e(-2.0, -1.0) == e(-1.0, -2.0)
    assert e.routes["lift_gap"] < 1e-8
    assert e.routes["lift"].omega == pytest.approx(0.5)


def test_example2_closed_form_oracle(oracles):
    h = catalog.example2(2.0).handle
    pts = np.array([row["s"] for row in oracles["example2_b2"]])
    want = np.array([row["value"] for row in oracles["example2_b2"]])
    np.testing.assert_allclose(h.eval(pts), want, rtol=0, atol=1e-13)


@pytest.mark.parametrize("alpha, c", [(0.5, 1.0), (0.3, 2.0), (0.7, 0.5)])
def test_shift_coherence(alpha, c):
    shifted = shift_normalize(catalog.power(alpha, 0.0).triple, [c])
    target = catalog.power(alpha, c)
    for s in (-0.1, -1.0, -5.0):
        assert evaluate_real(shifted, [s]) == pytest.approx(target(s), abs=1e-7)


def test_entry_json():
    d = catalog.log(2.0).to_json()
    assert d["name"] == "log" and d["params"] == {"b": 2.0} and d["triple"]["measure"]["kind"] == "parametric"
    assert catalog.arch(1.0).to_json()["triple"] is None
