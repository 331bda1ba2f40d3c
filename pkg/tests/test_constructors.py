import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import drift, exp_over_u, stable
from negbern import catalog
from negbern.constructors import (
    ConstructionError,
    WeightSpec,
    atomize,
    compose,
    conic_combine,
    divided_difference_lift,
    permute_arguments,
    pushforward,
    tail_integral,
)
from negbern.expr import parse_expression
from negbern.handles import FunctionHandle
from negbern.membership import verify_Tn
from negbern.representation import Atoms, LevyTriple, evaluate_real

LI1 = catalog.log(1.0).handle


def li_chain(p):
    h = LI1
    for _ in range(p - 1):
        h = tail_integral(h, WeightSpec.heaviside())
    return h


# --- composition and permutation ---------------------------------------------


def test_compose_with_identity():
    ident = parse_expression("s")
    f = catalog.power(0.5, 1.0).handle
    c = compose(f, ident)
    x = np.array([-0.1, -1.0, -5.0])
    np.testing.assert_allclose(c.eval(x), f.eval(x), rtol=0, atol=0)


def test_compose_li1_li1(oracles):
    c = compose(LI1, LI1)
    assert c(-1.0) == pytest.approx(oracles["compose_li1_li1_at_-1"], abs=1e-14)


def test_compose_drift_sums():
    c = compose(parse_expression("s1+s2"), parse_expression("s1+s2"))
    assert c.arity == 3
    assert c(-1.0, -2.0, -3.0) == pytest.approx(-6.0)


def test_compose_other_slot_unsupported():
    with pytest.raises(ConstructionError, match="permute"):
        compose(parse_expression("s1+s2"), LI1, slot=2)


def test_compose_needs_limit_at_origin():
    blowup = FunctionHandle(1, lambda x: -1.0 / (-x[:, 0]) ** 2)
    with pytest.raises(ConstructionError):
        compose(blowup, LI1)


def test_compose_associative():
    f, g, h = catalog.log(2.0).handle, catalog.power(0.5).handle, catalog.arch(1.0).handle
    x = np.linspace(-6, -0.1, 13)
    np.testing.assert_allclose(compose(compose(f, g), h).eval(x), compose(f, compose(g, h)).eval(x), rtol=1e-14)


@pytest.mark.parametrize("outer, inner", [("log", "power"), ("power", "arch"), ("arch", "log")])
def test_operad_closure_accepted(outer, inner):
    pick = {"log": catalog.log(1.0), "power": catalog.power(0.5), "arch": catalog.arch(1.0)}
    assert verify_Tn(compose(pick[outer].handle, pick[inner].handle), max_order=5).accepted


def test_permute_examples():
    f = parse_expression("s1+2*s2")
    assert permute_arguments(f, [1, 2]) is f
    sw = permute_arguments(f, [2, 1])
    assert sw(-1.0, -2.0) == pytest.approx(-4.0)
    back = permute_arguments(sw, [2, 1])
    assert back(-1.0, -2.0) == f(-1.0, -2.0)
    with pytest.raises(ValueError):
        permute_arguments(f, [1, 1])


def test_permute_orientation_three_slots():
    f = parse_expression("s1+10*s2+100*s3")
    g = permute_arguments(f, [2, 3, 1])
    # y[p(i)] = x[i]: y = (x3, x1, x2)
    assert g(-1.0, -2.0, -3.0) == pytest.approx(f(-3.0, -1.0, -2.0))


# --- conic ----------------------------------------------------------------------


def test_conic_identity_term():
    f, g = catalog.log(1.0).handle, catalog.arch(1.0).handle
    c = conic_combine([(1.0, f), (0.0, g)])
    assert c(-2.0) == f(-2.0)


def test_conic_drifts():
    t = conic_combine([(2.0, drift(1.0)), (3.0, drift(2.0))])
    assert isinstance(t, LevyTriple) and t.c1 == (8.0,)


def test_conic_mixed(oracles):
    c = conic_combine([(0.5, LI1), (0.5, catalog.power(0.5).handle)])
    assert c(-1.0) == pytest.approx(oracles["conic_half_li1_half_sqrt_at_-1"], abs=1e-14)


def test_conic_errors():
    with pytest.raises(ValueError):
        conic_combine([(-1.0, LI1)])
    with pytest.raises(ValueError):
        conic_combine([(1.0, LI1), (1.0, parse_expression("s1+s2"))])


# --- tail integrals -----------------------------------------------------------


def test_tail_integral_zero():
    zero = FunctionHandle(1, lambda x: 0 * x[:, 0], lambda z: 0 * z[:, 0])
    phi = tail_integral(zero, WeightSpec.heaviside())
    assert phi(-3.0) == 0.0


def test_tail_integral_li2(oracles):
    assert li_chain(2)(-1.0) == pytest.approx(oracles["li2_minus1"], abs=1e-12)


def test_tail_integral_expm1(oracles):
    psi = FunctionHandle(1, lambda x: np.expm1(x[:, 0]), lambda z: np.expm1(z[:, 0]))
    phi = tail_integral(psi, WeightSpec.heaviside())
    assert phi(-1.0) == pytest.approx(oracles["tail_expm1_u1"], abs=1e-12)


def test_tail_chain_matches_polylog_oracles(oracles):
    chains = {p: li_chain(p) for p in (2, 3, 4)}
    for row in oracles["polylog"]:
        p = row["p"]
        if p == 1:
            continue
        z = complex(*row["z"])
        want = complex(*row["value"])
        got = chains[p](z) if z.imag else chains[p](z.real)
        assert abs(got - want) < 1e-9 * max(1.0, abs(want))


@pytest.mark.parametrize("p", [2, 3, 4])
def test_tail_chain_accepted(p):
    assert verify_Tn(li_chain(p), max_order=5).accepted


def test_tail_integral_rejects_nonzero_far_slope():
    with pytest.raises(ConstructionError, match="does not vanish"):
        tail_integral(parse_expression("s"), WeightSpec.heaviside())


def test_tail_integral_existence_probe():
    # w(t) = (-t)^-2 makes the integral diverge at t = 0 for Li_1 ~ t
    with pytest.raises(ConstructionError, match="not constructible"):
        tail_integral(LI1, WeightSpec.power(1))


def test_weight_specs():
    s = np.array([-0.5, -2.0])
    np.testing.assert_allclose(WeightSpec.power(0).w(s), WeightSpec.heaviside().w(s))
    sat = WeightSpec.saturating(2.0)
    assert WeightSpec.from_json(sat.to_json()).to_json() == sat.to_json()
    r = np.linspace(0, 5, 11)
    tab = WeightSpec.tabulated(r, np.minimum(r, 1.0))
    assert np.all(tab.w(s) > 0)
    with pytest.raises(ConstructionError):
        WeightSpec.tabulated(r, np.maximum(1.0 - r, 0.0))
    with pytest.raises(ConstructionError):
        WeightSpec(lambda t: -1.0 / t, lambda r: 2 * np.ones_like(r), "wrong")


def test_saturating_tail_integral_accepted():
    phi = tail_integral(LI1, WeightSpec.saturating(1.0))
    assert verify_Tn(phi, max_order=4).accepted


# --- divided-difference lift ---------------------------------------------------


@pytest.fixture(scope="module")
def lift_b2():
    return divided_difference_lift(exp_over_u(2.0))


def test_lift_omega(lift_b2):
    assert lift_b2.omega == pytest.approx(0.5, abs=1e-12)


def test_lift_values(lift_b2, oracles):
    h = lift_b2.handle
    assert h(-1.0, -2.0) == pytest.approx(oracles["example2_b2_anchor"], abs=1e-10)
    assert h(-1.0, -1.0) == pytest.approx(-1.0 / 6.0, abs=1e-10)


def test_lift_symmetry_exact(lift_b2):
    rng = np.random.default_rng(5)
    pts = -np.exp(rng.uniform(-3, 2, size=(20, 2)))
    h = lift_b2.handle
    np.testing.assert_array_equal(h.eval(pts), h.eval(pts[:, ::-1]))


def test_lift_pushforward_agrees(lift_b2):
    pts = np.array([[-1.0, -2.0], [-0.2, -5.0], [-3.0, -3.0]])
    direct = lift_b2.handle.eval(pts)
    via = np.array([evaluate_real(lift_b2.triple, p) for p in pts])
    np.testing.assert_allclose(via, direct, atol=1e-4)


def test_lift_requires_no_drift():
    with pytest.raises(ConstructionError):
        divided_difference_lift(LevyTriple(1, 0.0, (1.0,)))


def test_lift_requires_finite_omega():
    with pytest.raises(ConstructionError):
        divided_difference_lift(stable(0.5))


def test_atomize_and_pushforward_mass():
    at = atomize(exp_over_u(2.0).measure, 200)
    assert isinstance(at, Atoms) and len(at) == 200
    assert np.sum(at.weights * at.points[:, 0]) == pytest.approx(0.5, rel=1e-6)
    push = pushforward(Atoms([[2.0]], [1.0]), nodes=8)
    # mass of (1/2) dw over |w| <= v is v; first moments are v^2/2 each
    assert push.weights.sum() == pytest.approx(2.0)
    np.testing.assert_allclose(push.weights @ push.points, [2.0, 2.0])


@settings(max_examples=30, deadline=None)
@given(st.floats(-6, -0.05), st.floats(-6, -0.05))
def test_example2_closed_form_symmetric(a, b):
    h = catalog.example2(2.0, atoms=50).handle
    assert h(a, b) == h(b, a)
