"""Family formulas against brute-force scipy quadrature of the densities."""

import math

import numpy as np
import pytest
from scipy import integrate

from negbern.families import ExponentialOverU, StableDensity, family_from_json
from negbern.quadrature import composite_gauss, fixed_gauss, gauss_legendre

FAMILIES = [
    StableDensity(0.3),
    StableDensity(0.5),
    StableDensity(0.7, tempering=2.0),
    StableDensity(0.5, tempering=1.0, scale=3.0),
    ExponentialOverU(1.0),
    ExponentialOverU(2.5, scale=0.5),
]


def quad(f, a, b):
    return integrate.quad(f, a, b, limit=400, epsabs=1e-13, epsrel=1e-12)[0]


@pytest.mark.parametrize("fam", FAMILIES, ids=repr)
@pytest.mark.parametrize("x", [0.3, 1.0, 4.0])
def test_partial_moments(fam, x):
    rho = lambda u: float(fam.density(np.array([u]))[0])  # noqa: E731
    assert fam.first_moment_below(x) == pytest.approx(quad(lambda u: u * rho(u), 0, x), rel=1e-8)
    assert fam.second_moment_below(x) == pytest.approx(quad(lambda u: u * u * rho(u), 0, x), rel=1e-8)
    assert fam.tail_mass(x) == pytest.approx(quad(rho, x, np.inf), rel=1e-8)
    above = fam.first_moment_above(x)
    if math.isfinite(above):
        assert above == pytest.approx(quad(lambda u: u * rho(u), x, np.inf), rel=1e-8)


@pytest.mark.parametrize("alpha", [0.3, 0.5, 0.7])
@pytest.mark.parametrize("s", [-0.1, -1.0, -10.0])
def test_stable_normalization_brute_force(alpha, s):
    # the density alpha/Gamma(1-alpha) u^(-1-alpha) must integrate (e^{su}-1) to -(-s)^alpha
    fam = StableDensity(alpha)
    g = lambda u: math.expm1(s * u) * float(fam.density(np.array([u]))[0])  # noqa: E731
    val = quad(g, 0, 1) + quad(g, 1, np.inf)
    assert val == pytest.approx(-((-s) ** alpha), rel=1e-7)


@pytest.mark.parametrize("s", [-0.2, -1.0, -7.0])
def test_exp_over_u_normalization_brute_force(s):
    val = quad(lambda u: math.expm1(s * u) * math.exp(-u) / u, 0, np.inf)
    assert val == pytest.approx(-math.log(1 - s), rel=1e-9)


@pytest.mark.parametrize("fam", FAMILIES, ids=repr)
def test_closed_form_complex_matches_quadrature(fam):
    z = -0.7 + 1.3j
    rho = lambda u: float(fam.density(np.array([u]))[0])  # noqa: E731
    re = quad(lambda u: (math.exp(z.real * u) * math.cos(z.imag * u) - 1) * rho(u), 0, 1) + quad(
        lambda u: (math.exp(z.real * u) * math.cos(z.imag * u) - 1) * rho(u), 1, np.inf
    )
    im = quad(lambda u: math.exp(z.real * u) * math.sin(z.imag * u) * rho(u), 0, 1) + quad(
        lambda u: math.exp(z.real * u) * math.sin(z.imag * u) * rho(u), 1, np.inf
    )
    got = complex(fam.closed_form(z))
    assert abs(got - complex(re, im)) < 1e-7


def test_scaled_and_damped():
    fam = StableDensity(0.5)
    assert fam.scaled(2.0).tail_mass(1.0) == pytest.approx(2 * fam.tail_mass(1.0))
    d = fam.damped(1.5)
    assert d == StableDensity(0.5, tempering=1.5)
    u = np.array([0.1, 1.0, 3.0])
    np.testing.assert_allclose(d.density(u), fam.density(u) * np.exp(-1.5 * u))
    e = ExponentialOverU(1.0).damped(1.0)
    np.testing.assert_allclose(e.density(u), np.exp(-2 * u) / u)


def test_equality_and_json_roundtrip():
    a = StableDensity(0.4, tempering=0.5)
    assert a == StableDensity(0.4, tempering=0.5)
    assert hash(a) == hash(StableDensity(0.4, tempering=0.5))
    assert a != ExponentialOverU(0.5)
    assert family_from_json(a.name, a.params()) == a


@pytest.mark.parametrize("bad", [dict(alpha=0.0), dict(alpha=1.0), dict(alpha=0.5, tempering=-1)])
def test_stable_parameter_ranges(bad):
    with pytest.raises(ValueError):
        StableDensity(**bad)


def test_exp_over_u_needs_positive_rate():
    with pytest.raises(ValueError):
        ExponentialOverU(0.0)


def test_gauss_legendre_exact_on_polynomials():
    x, w = gauss_legendre(10)
    assert not x.flags.writeable
    for k in range(20):
        exact = 0.0 if k % 2 else 2.0 / (k + 1)
        assert np.dot(w, x**k) == pytest.approx(exact, abs=1e-14)


def test_composite_and_fixed():
    assert fixed_gauss(np.exp, 0.0, 1.0) == pytest.approx(math.e - 1, rel=1e-14)
    assert composite_gauss(np.sin, np.linspace(0, math.pi, 5)) == pytest.approx(2.0, rel=1e-14)
