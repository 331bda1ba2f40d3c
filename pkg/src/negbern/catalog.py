"""Named members of T_1 and T_2 with closed forms and, where known, Levy triples.

    power    c^a - (c - s)^a           0 < a < 1, c >= 0   stable density, tempered by c
    log      log b - log(b - s)        b >= 1              exp(-b u)/u
    arch     arcosh b - arcosh(b - s)  b >= 1              (no triple)
    polylog  Li_p(s)                   p = 1, 2, ...       Li_1 only
    example2 (1/(s1-s2)) log((b-s2)/(b-s1)) - 1/b,  b >= 1  pushforward of the log triple
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .constructors import divided_difference_lift
from .families import ExponentialOverU, StableDensity
from .handles import FunctionHandle
from .quadrature import gauss_legendre
from .representation import LevyTriple, Parametric


@dataclass
class CatalogEntry:
    name: str
    params: dict
    handle: FunctionHandle
    triple: LevyTriple = None
    notes: str = ""
    routes: dict = field(default_factory=dict)

    @property
    def arity(self):
        return self.handle.arity

    def __call__(self, *x):
        return self.handle(*x)

    def to_json(self):
        return {
            "name": self.name,
            "params": self.params,
            "arity": self.arity,
            "triple": None if self.triple is None else self.triple.to_json(),
            "notes": self.notes,
        }


def _handle(arity, real, cplx, name, params):
    return FunctionHandle(arity, real, cplx, {"catalog": name, "params": dict(params)})


def power(alpha, c=0.0):
    if not 0 < alpha < 1:
        raise ValueError(f"power: need 0 < alpha < 1, got alpha={alpha}")
    if c < 0:
        raise ValueError(f"power: need c >= 0, got c={c}")
    alpha, c = float(alpha), float(c)
    h = _handle(
        1,
        lambda x: c**alpha - (c - x[:, 0]) ** alpha,
        lambda z: c**alpha - (c - z[:, 0]) ** alpha,
        "power",
        {"alpha": alpha, "c": c},
    )
    t = LevyTriple(1, 0.0, (0.0,), Parametric(StableDensity(alpha, tempering=c)))
    notes = "c^alpha - (c - s)^alpha; Levy density alpha/Gamma(1-alpha) u^(-1-alpha) e^(-c u)"
    return CatalogEntry("power", {"alpha": alpha, "c": c}, h, t, notes)


def log(b=1.0):
    if b < 1:
        raise ValueError(f"log: need b >= 1, got b={b}")
    b = float(b)
    h = _handle(
        1,
        lambda x: -np.log1p(-x[:, 0] / b),
        lambda z: -np.log1p(-z[:, 0] / b),
        "log",
        {"b": b},
    )
    t = LevyTriple(1, 0.0, (0.0,), Parametric(ExponentialOverU(b)))
    return CatalogEntry("log", {"b": b}, h, t, "log b - log(b - s); Levy density e^(-b u)/u; b = 1 gives Li_1")


def arch(b=1.0):
    if b < 1:
        raise ValueError(f"arch: need b >= 1, got b={b}")
    b = float(b)
    a0 = math.acosh(b)
    h = _handle(
        1,
        lambda x: a0 - np.arccosh(b - x[:, 0]),
        lambda z: a0 - np.arccosh(b - z[:, 0]),
        "arch",
        {"b": b},
    )
    return CatalogEntry("arch", {"b": b}, h, None, "arcosh b - arcosh(b - s); closed form only")


# ---------------------------------------------------------------------------
# polylogarithms

ANCHOR = 0.5
SERIES_TERMS = 60  # 0.5**60 < 1e-18
RAY_NODES = 20
RAY_CHUNK = 256


def polylog_series(p, z, terms=None):
    """sum_{k>=1} z^k / k^p for |z| < 1."""
    z = np.asarray(z)
    if terms is None:
        rmax = float(np.max(np.abs(z))) if z.size else 0.0
        terms = SERIES_TERMS if rmax <= ANCHOR else int(math.ceil(math.log(1e-17) / math.log(rmax))) + 1
    k = np.arange(1, terms + 1)
    powers = z[..., None] ** k
    return np.sum(powers / k**p, axis=-1)


def polylog_recursion(p, z):
    """Li_p by the radial recursion Li_p(z0 e^L) = Li_p(z0) + int_0^L Li_{p-1}(z0 e^x) dx.

    z0 = 0.5 z/|z| lies on the same ray as z, inside the disk where the
    series is fast; every inner node stays on that ray, so the anchors
    Li_q(z0) are summed once per point. Li_1 is closed-form. Works for real
    s < 0 and for complex z off the cut [1, inf).
    """
    z = np.asarray(z)
    if p == 1:
        return -np.log1p(-z)
    out = np.empty(z.shape, dtype=z.dtype)
    flat, res = z.ravel(), out.ravel()
    for i in range(0, flat.size, RAY_CHUNK):
        res[i : i + RAY_CHUNK] = _ray_chunk(p, flat[i : i + RAY_CHUNK])
    return out


def _ray_chunk(p, z):
    r = np.abs(z)
    small = r <= ANCHOR
    out = np.empty(z.shape, dtype=z.dtype)
    out[small] = polylog_series(p, z[small], SERIES_TERMS)
    if np.any(~small):
        zb = z[~small]
        u = zb / np.abs(zb)
        anchors = {q: polylog_series(q, ANCHOR * u, SERIES_TERMS) for q in range(2, p + 1)}
        out[~small] = _along_ray(p, u, np.abs(zb), anchors)
    return out


def _along_ray(p, u, r, anchors):
    """Li_p(u r) for unit u and r >= ANCHOR; u and anchors broadcast against r."""
    if p == 1:
        return -np.log1p(-u * r)
    x, w = gauss_legendre(RAY_NODES)
    L = np.log(r / ANCHOR)
    radii = ANCHOR * np.exp(0.5 * L[..., None] * (1 + x))
    inner = _along_ray(p - 1, u[..., None], radii, {q: a[..., None] for q, a in anchors.items()})
    return anchors[p] + 0.5 * L * (inner @ w)


def polylog(p):
    if int(p) != p or p < 1:
        raise ValueError(f"polylog: need an integer order p >= 1, got p={p}")
    p = int(p)

    def real(x):
        return polylog_recursion(p, x[:, 0].astype(float))

    def cplx(z):
        return polylog_recursion(p, z[:, 0].astype(complex))

    h = _handle(1, real, cplx, "polylog", {"p": p})
    # measured against mpmath on the test lattices: |error| <= 2 eps max|Li_p|
    h.rel_noise = 0.0 if p == 1 else 1.0
    # two routes on (-1, 0): recursion quadrature vs the defining series
    probe = np.array([-0.95, -0.8, -0.6, -0.3])
    recursion = polylog_recursion(p, probe)
    series = polylog_series(p, probe)
    gap = float(np.max(np.abs(recursion - series)))
    if gap > 1e-6:
        raise ArithmeticError(f"Li_{p}: recursion and series disagree by {gap:.3g}")
    triple = log(1.0).triple if p == 1 else None
    notes = f"Li_{p}(s) = sum s^k/k^{p}; recursion Li_p(s) = int_s^0 Li_(p-1)(t)(-1/t) dt"
    return CatalogEntry("polylog", {"p": p}, h, triple, notes, {"series_gap": gap})


# ---------------------------------------------------------------------------
# two-variable example


def _example2_closed(b):
    def value(a, c):
        # canonical order: a >= c in (real, imag) lexicographic order, as in the lift
        swap = (a.real < c.real) | ((a.real == c.real) & (a.imag < c.imag))
        a, c = np.where(swap, c, a), np.where(swap, a, c)
        d = a - c
        diag = np.abs(d) < 1e-6
        m = 0.5 * (a + c)
        safe = np.where(diag, 1.0, d)
        off = np.log1p(d / (b - a)) / safe - 1.0 / b
        on = 1.0 / (b - m) - 1.0 / b
        return np.where(diag, on, off)

    return value


def example2(b=1.0, atoms=1000):
    if b < 1:
        raise ValueError(f"example2: need b >= 1, got b={b}")
    b = float(b)
    lift = divided_difference_lift(log(b).triple, atoms=atoms)
    closed = _example2_closed(b)
    h = _handle(
        2,
        lambda x: closed(x[:, 0], x[:, 1]).real,
        lambda z: closed(z[:, 0].astype(complex), z[:, 1].astype(complex)),
        "example2",
        {"b": b},
    )
    probe = np.array([[-1.0, -2.0], [-0.5, -0.5], [-3.0, -0.2]])
    gap = float(np.max(np.abs(h.eval(probe) - lift.handle.eval(probe))))
    if gap > 1e-8:
        raise ArithmeticError(f"example2: lift and closed form disagree by {gap:.3g}")
    if abs(lift.omega - 1.0 / b) > 1e-10:
        raise ArithmeticError(f"example2: omega {lift.omega} differs from 1/b")
    notes = "divided-difference lift of log b - log(b - s); omega = 1/b"
    return CatalogEntry("example2", {"b": b}, h, lift.triple, notes, {"lift": lift, "lift_gap": gap})


# ---------------------------------------------------------------------------
# registry

REGISTRY = {
    "power": (power, {"alpha": "0 < alpha < 1", "c": "c >= 0 (default 0)"}),
    "log": (log, {"b": "b >= 1 (default 1)"}),
    "arch": (arch, {"b": "b >= 1 (default 1)"}),
    "polylog": (polylog, {"p": "integer p >= 1"}),
    "example2": (example2, {"b": "b >= 1 (default 1)"}),
}


def names():
    return sorted(REGISTRY)


def get(name, **params):
    try:
        factory, _ = REGISTRY[name]
    except KeyError:
        raise KeyError(f"unknown catalog entry {name!r}; known: {names()}") from None
    try:
        return factory(**params)
    except TypeError as e:
        raise ValueError(f"{name}: bad parameters {params}: {e}") from None


def standard_entries():
    """The instances the test-suites sweep: every family at a few parameters."""
    return [
        power(0.5, 0.0),
        power(0.3, 1.0),
        power(0.7, 2.0),
        log(1.0),
        log(2.0),
        arch(1.0),
        arch(3.0),
        polylog(1),
        polylog(2),
        polylog(3),
        polylog(4),
        example2(2.0),
    ]
