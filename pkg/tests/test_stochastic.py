import math

import numpy as np
import pytest
from conftest import atom, drift, stable
from hypothesis import given, settings
from hypothesis import strategies as st

from negbern.families import StableDensity
from negbern.stochastic import (
    SamplingError,
    SimPlan,
    _FamilyJumps,
    decompose,
    empirical_laplace,
    power_scaling_check,
    sample_increments,
    truncation_bias,
    verify_exponent,
)


def test_plan_defaults_and_validation():
    p = SimPlan(drift(1.0, dim=2))
    assert p.probes.shape == (9, 2) and p.times == (0.5, 1.0, 2.0)
    with pytest.raises(ValueError):
        SimPlan(drift(), probes=[[0.5]])
    with pytest.raises(ValueError):
        SimPlan(drift(), times=(0.0, 1.0))
    with pytest.raises(ValueError):
        SimPlan(drift(), samples=10)
    with pytest.raises(ValueError):
        SimPlan(drift(), eps=0.0)


def test_drift_is_deterministic():
    plan = SimPlan(drift(1.5), samples=1000, seed=3)
    est = empirical_laplace(sample_increments(plan))
    for i, t in enumerate(plan.times):
        np.testing.assert_allclose(est.g_hat[i], np.exp(1.5 * t * plan.probes[:, 0]), rtol=1e-14)
        assert np.all(est.stderr[i] < 1e-15)
    assert verify_exponent(plan, est=est).passed


def test_atom_counts_are_poisson():
    plan = SimPlan(atom(1.0, 2.0), times=(1.0,), samples=50_000, seed=7)
    X = sample_increments(plan).increments[0][:, 0]
    assert np.allclose(X, np.round(X))
    assert abs(X.mean() - 2.0) < 4 * math.sqrt(2.0 / X.size)
    assert abs(X.var() - 2.0) < 0.1


def test_atom_laplace_matches_closed_form():
    plan = SimPlan(atom(1.0, 1.0), samples=100_000, seed=11)
    rep = verify_exponent(plan)
    assert rep.passed
    for r in rep.rows:
        assert r.t_psi == pytest.approx(r.t * (math.exp(r.s[0]) - 1.0), abs=1e-12)


def test_survival_fraction():
    plan = SimPlan(atom(1.0, 0.0, c0=-0.5), times=(1.0,), samples=40_000, seed=5)
    alive = sample_increments(plan).alive[0]
    assert abs(alive.mean() - math.exp(-0.5)) < 4 * math.sqrt(0.25 / alive.size)


def test_g_hat_in_unit_interval():
    plan = SimPlan(stable(0.5), samples=5000, seed=1)
    est = empirical_laplace(sample_increments(plan))
    assert np.all(est.g_hat > 0) and np.all(est.g_hat <= 1)


def test_all_killed_is_insufficient():
    plan = SimPlan(atom(1.0, 1.0, c0=-60.0), times=(1.0,), samples=500, seed=0)
    rep = verify_exponent(plan)
    assert {r.status for r in rep.rows} == {"insufficient"}
    assert not rep.passed


def test_reproducible_and_schedule_independent():
    plan = SimPlan(stable(0.5), samples=20_000, seed=42)
    a = sample_increments(plan)
    b = sample_increments(plan, workers=4)
    for x, y in zip(a.increments, b.increments):
        assert np.array_equal(x, y)
    assert verify_exponent(plan, samples=a).to_csv() == verify_exponent(plan, samples=b).to_csv()
    other = sample_increments(SimPlan(stable(0.5), samples=20_000, seed=43))
    assert not np.array_equal(a.increments[0], other.increments[0])


def test_csv_layout():
    plan = SimPlan(drift(1.0), samples=200, seed=0)
    text = verify_exponent(plan).to_csv()
    lines = text.split("\r\n")
    assert lines[0] == "t,s,g_hat,stderr,t_psi_eps,t_psi,pass"
    assert lines[-1] == ""
    assert len(lines) == 2 + 3 * 3
    assert lines[1].startswith("0.5,-0.5,")


def test_truncation_bias_shrinks():
    tr = stable(0.5)
    b = [abs(truncation_bias(tr, [-1.0], e)) for e in (1e-2, 1e-3, 1e-4)]
    assert b[0] > b[1] > b[2] > 0
    # for alpha = 1/2 the bias scales like eps^(3/2)
    assert b[0] / b[1] == pytest.approx(10**1.5, rel=0.05)


def test_atoms_split_at_cutoff():
    from negbern.representation import Atoms, LevyTriple

    tr = LevyTriple(1, 0.0, (0.0,), Atoms(np.array([[1e-4], [0.5]]), np.array([3.0, 1.0])))
    comps, d = decompose(tr.measure, 1e-3)
    assert len(comps) == 1 and comps[0].rate == 1.0
    assert d[0] == pytest.approx(3e-4)


def test_stable_inverse_cdf():
    fam = StableDensity(0.5)
    cut = 1e-3
    jumps = _FamilyJumps(fam, np.array([1.0]), cut)
    q = np.linspace(0.0, 10.0, 41)
    exact = cut * np.exp(q / 0.5)
    np.testing.assert_allclose(np.exp(jumps.spline(q)), exact, rtol=1e-6)
    assert jumps.rate == pytest.approx(fam.tail_mass(cut))


def test_family_without_tail_raises():
    class NoTail:
        name = "notail"

        def tail_mass(self, v):
            raise NotImplementedError

    with pytest.raises(SamplingError):
        _FamilyJumps(NoTail(), np.array([1.0]), 1e-3)


@pytest.mark.parametrize("a", [1, 2])
def test_power_scaling(a):
    plan = SimPlan(stable(0.5), samples=50_000, seed=9)
    rep = power_scaling_check(plan, a)
    assert rep.passed
    assert len(rep.rows) == (9 if a == 1 else 6)


def test_power_scaling_half_drift():
    plan = SimPlan(drift(1.0), samples=200, seed=0)
    rep = power_scaling_check(plan, 0.5)
    assert rep.passed
    for r in rep.rows:
        assert r["g_at"] == pytest.approx(r["g_t_pow_a"], rel=1e-14)


def test_power_scaling_missing_time():
    plan = SimPlan(drift(1.0), times=(1.0,), samples=200)
    with pytest.raises(ValueError):
        power_scaling_check(plan, 3)


def test_wrong_triple_rejected():
    plan = SimPlan(drift(1.0), samples=200)
    with pytest.raises(ValueError):
        verify_exponent(plan, triple=drift(2.0))


@settings(max_examples=15, deadline=None)
@given(st.floats(0.1, 3.0), st.floats(0.0, 0.5))
def test_killing_is_unbiased(slope, kill):
    from negbern.representation import LevyTriple

    plan = SimPlan(LevyTriple(1, -kill, (slope,)), times=(1.0,), samples=20_000, seed=0)
    est = empirical_laplace(sample_increments(plan))
    q = math.exp(-kill)
    want = q * math.exp(-slope)
    # exact binomial sigma: with rare killing the sample stderr is often 0
    sigma = math.exp(-slope) * math.sqrt(q * (1 - q) / plan.samples)
    assert abs(est.g_hat[0, 1] - want) <= 5 * sigma + 1e-15
