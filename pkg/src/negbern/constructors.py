"""Ways of building new members of T from old ones.

compose          first-slot substitution, T_n x T_m -> T_{m+n-1}
conic_combine    nonnegative linear combinations
tail_integral    phi(s) = int_s^0 psi(t) w(t) dt with a Laplace-image weight
divided_difference_lift
                 psi1 in T_1 -> (psi1(s1) - psi1(s2))/(s1 - s2) - omega in T_2
permute_arguments
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .families import Family
from .handles import FunctionHandle
from .quadrature import QuadratureError, gauss_legendre, panel_nodes
from .representation import (
    Atoms,
    GridDensity,
    LevyTriple,
    Parametric,
    SumMeasure,
    _divided_kernel,
    combine_triples,
    family_integral,
)

COMPOSE_FLOOR = -1e-12
DIAGONAL_GAP = 1e-6


class ConstructionError(ValueError):
    pass


# ---------------------------------------------------------------------------
# composition and permutation


def compose(psi1, psi2, slot=1):
    """(r, s_2..s_n) -> psi1(psi2(r), s_2, ..., s_n).

    Inner values are floored at -1e-12 so that psi1 is never asked for its
    first argument at or above 0; psi1(-0) is its constant term c0.
    """
    if slot != 1:
        raise ConstructionError(
            f"composition into slot {slot} is unsupported; permute_arguments psi1 so the target slot comes first"
        )
    m, n = psi2.arity, psi1.arity
    probe = np.full((1, n), -1.0)
    probe[0, 0] = COMPOSE_FLOOR
    edge = psi1.eval(probe)[0]
    probe[0, 0] = -1e-9
    before = psi1.eval(probe)[0]
    # members are nondecreasing toward 0, so the limit exists iff this holds
    if not np.isfinite(edge) or edge < before - 1e-9 * (1 + abs(before)):
        raise ConstructionError("outer function has no finite limit at the origin of its first slot")

    def real(x):
        inner = np.minimum(psi2.eval(x[:, :m]), COMPOSE_FLOOR)
        return psi1.eval(np.column_stack([inner, x[:, m:]]))

    cplx = None
    if psi1.has_complex and psi2.has_complex:

        def cplx(z):
            inner = psi2.eval_complex(z[:, :m])
            inner = np.minimum(inner.real, COMPOSE_FLOOR) + 1j * inner.imag
            return psi1.eval_complex(np.column_stack([inner, z[:, m:]]))

    return FunctionHandle(
        m + n - 1,
        real,
        cplx,
        {"op": "compose", "args": [psi1.provenance, psi2.provenance]},
        lower=psi2.lower,
        noise=psi1.noise + psi2.noise,
        rel_noise=psi1.rel_noise + psi2.rel_noise,
    )


def permute_arguments(psi, permutation):
    """Relabel slots: the result at x equals psi at y with y[p(i)] = x[i].

    ``permutation`` is a 1-based list [p(1), ..., p(n)]. Equivalently the
    result evaluates psi at x permuted by the inverse of p.
    """
    p = [int(i) for i in permutation]
    n = psi.arity
    if sorted(p) != list(range(1, n + 1)):
        raise ValueError(f"{permutation} is not a permutation of 1..{n}")
    idx = np.array(p) - 1
    if np.all(idx == np.arange(n)):
        return psi

    def _move(x):
        y = np.empty_like(x)
        y[:, idx] = x
        return y

    cplx = None
    if psi.has_complex:
        cplx = lambda z: psi.eval_complex(_move(z))  # noqa: E731
    return FunctionHandle(
        n,
        lambda x: psi.eval(_move(x)),
        cplx,
        {"op": "permute", "permutation": p, "args": [psi.provenance]},
        psi.lower,
        psi.noise,
        rel_noise=psi.rel_noise,
    )


# ---------------------------------------------------------------------------
# cone operations


def conic_combine(terms):
    """sum(a_i * f_i) for a_i >= 0; triples in, triple out, otherwise a handle."""
    terms = [(float(a), f) for a, f in terms]
    if not terms:
        raise ValueError("nothing to combine")
    if any(a < 0 for a, _ in terms):
        raise ValueError("conic combination needs nonnegative coefficients")
    arities = {f.dim if isinstance(f, LevyTriple) else f.arity for _, f in terms}
    if len(arities) != 1:
        raise ValueError(f"mixed arities {sorted(arities)}")
    if all(isinstance(f, LevyTriple) for _, f in terms):
        return combine_triples(terms)
    handles = [(a, f if isinstance(f, FunctionHandle) else FunctionHandle.from_triple(f)) for a, f in terms]
    (arity,) = arities

    def real(x):
        return sum(a * f.eval(x) for a, f in handles)

    cplx = None
    if all(f.has_complex for _, f in handles):
        cplx = lambda z: sum(a * f.eval_complex(z) for a, f in handles)  # noqa: E731
    triple = None
    if all(f.triple is not None for _, f in handles):
        triple = combine_triples([(a, f.triple) for a, f in handles])
    return FunctionHandle(
        arity,
        real,
        cplx,
        {"op": "conic", "coefs": [a for a, _ in handles], "args": [f.provenance for _, f in handles]},
        max(f.lower for _, f in handles),
        sum(a * f.noise for a, f in handles),
        triple,
        max(f.rel_noise for _, f in handles),
    )


# ---------------------------------------------------------------------------
# tail integrals


class WeightSpec:
    """Weight w(t), t < 0, with w(-p) the Laplace transform of a nonnegative
    nondecreasing original f.

    ``w`` must be vectorized and accept complex t with Re t < 0 if complex
    evaluation of tail integrals is wanted.
    """

    def __init__(self, w, original, name, params=None, original_grid=None, check=True):
        self.w = w
        self.original = original
        self.name = name
        self.params = dict(params or {})
        self.original_grid = original_grid
        if check:
            self._check()

    def _check(self):
        r = self.original_grid if self.original_grid is not None else np.linspace(0.0, 20.0, 401)
        f = np.asarray(self.original(r), dtype=float)
        if np.any(f < 0):
            raise ConstructionError(f"weight original {self.name} takes negative values")
        if np.any(np.diff(f) < -1e-12 * max(1.0, np.max(np.abs(f)))):
            raise ConstructionError(f"weight original {self.name} is not nondecreasing")
        t = -np.geomspace(1e-3, 1e2, 11)
        if np.any(np.real(self.w(t)) < 0):
            raise ConstructionError(f"weight {self.name} is negative somewhere on t < 0")
        for p in (0.5, 1.0, 2.0):
            want = integrate.quad(lambda r: math.exp(-p * r) * float(self.original(np.array([r]))[0]), 0, np.inf, limit=200)[0]
            got = float(np.real(self.w(np.array([-p]))[0]))
            if abs(got - want) > 1e-6 * max(1.0, abs(want)):
                raise ConstructionError(f"weight {self.name}: w(-{p}) = {got} but the original transforms to {want}")

    @classmethod
    def heaviside(cls):
        """w(t) = -1/t, the image of the unit step."""
        return cls(lambda t: -1.0 / t, lambda r: np.ones_like(np.asarray(r, dtype=float)), "heaviside")

    @classmethod
    def power(cls, k):
        """w(t) = (-t)^(-k-1), original r^k / k!."""
        if k < 0:
            raise ValueError("power weight needs k >= 0")
        g = math.gamma(k + 1)
        return cls(
            lambda t: (-t) ** (-k - 1.0),
            lambda r: np.asarray(r, dtype=float) ** k / g,
            "power",
            {"k": k},
        )

    @classmethod
    def saturating(cls, a):
        """Original 1 - exp(-a r): w(t) = -1/t - 1/(a - t)."""
        if not a > 0:
            raise ValueError("saturating weight needs a > 0")
        return cls(
            lambda t: -1.0 / t - 1.0 / (a - t),
            lambda r: -np.expm1(-a * np.asarray(r, dtype=float)),
            "saturating",
            {"a": a},
        )

    @classmethod
    def tabulated(cls, r, f):
        """Piecewise-linear original through (r_i, f_i), flat outside the table."""
        r = np.asarray(r, dtype=float)
        f = np.asarray(f, dtype=float)
        if r.ndim != 1 or r.shape != f.shape or r.size < 2 or np.any(np.diff(r) <= 0) or r[0] < 0:
            raise ConstructionError("tabulated original needs increasing r >= 0 and matching values")
        slopes = np.diff(f) / np.diff(r)

        def original(x):
            return np.interp(x, r, f)

        def w(t):
            p = -np.asarray(t)[..., None]
            ends = np.exp(-p * r[:-1]) - np.exp(-p * r[1:])
            return (f[0] / p[..., 0]) + np.sum(slopes * ends, axis=-1) / p[..., 0] ** 2

        return cls(w, original, "tabulated", {"r": r.tolist(), "f": f.tolist()}, original_grid=np.linspace(0, r[-1] * 1.5, 601))

    def to_json(self):
        return {"name": self.name, "params": self.params}

    @classmethod
    def from_json(cls, obj):
        name, params = obj["name"], obj.get("params", {})
        if name == "heaviside":
            return cls.heaviside()
        if name == "power":
            return cls.power(params["k"])
        if name == "saturating":
            return cls.saturating(params["a"])
        if name == "tabulated":
            return cls.tabulated(params["r"], params["f"])
        raise ValueError(f"unknown weight {name!r}")


# tau-panels for t = s*exp(-tau); exp(-48) ~ 1e-21
TAU_EDGES = (0.0, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0, 24.0, 32.0, 48.0)
TAU_NODES = 10
CHUNK = 32  # bounds memory of nested tail integrals


def _tau_rule():
    x, w = gauss_legendre(TAU_NODES)
    e = np.array(TAU_EDGES)
    mid = 0.5 * (e[1:] + e[:-1])
    half = 0.5 * (e[1:] - e[:-1])
    tau = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    wt = (half[:, None] * w[None, :]).ravel()
    return tau, wt


def _tail_terms(psi_eval, w, s):
    """Integrand samples (m, K) of phi(s) in the tau variable, and weights."""
    tau, wt = _tau_rule()
    t = s[:, None] * np.exp(-tau)[None, :]
    vals = psi_eval(t.reshape(-1, 1)).reshape(t.shape)
    g = vals * w(t) * (-s[:, None]) * np.exp(-tau)[None, :]
    return g, wt


def _panel_sizes(g, wt):
    per = np.abs(g) * wt[None, :]
    return per.reshape(g.shape[0], len(TAU_EDGES) - 1, TAU_NODES).sum(axis=2)


def _far_left_slope(psi):
    slopes = []
    for t in (-1e3, -1e6):
        h = 1e-3 * abs(t)
        v = psi.eval(np.array([[t - h], [t + h]]))
        slopes.append((v[1] - v[0]) / (2 * h))
    return slopes


def tail_integral(psi, w, tol=1e-10, slope_tol=1e-3):
    """phi(s) = int_s^0 psi(t) w(t) dt, evaluated as
    (-s) * int_0^inf psi(s e^-tau) w(s e^-tau) e^-tau dtau on fixed Gauss panels.
    """
    if psi.arity != 1:
        raise ConstructionError("tail_integral takes a function of one variable")
    near, far = _far_left_slope(psi)
    if not (far <= slope_tol or far <= 0.9 * near):
        raise ConstructionError(f"psi'(-inf) does not vanish: slope {far:.3g} at t=-1e6 (and {near:.3g} at t=-1e3)")
    probe_s = np.array([-1.0, -8.0])
    g, wt = _tail_terms(psi.eval, w.w, probe_s)
    sizes = _panel_sizes(g, wt)
    if not np.all(np.isfinite(sizes)):
        raise ConstructionError("integrand is not finite near t = 0; the integral does not exist at tolerance")
    last, prev = sizes[:, -1], sizes[:, -2]
    if np.any(last > tol) or np.any(last > 0.5 * prev + 1e-300):
        raise ConstructionError(
            f"tail integral is not constructible at tolerance: panels near the endpoint t = 0 do not decay "
            f"(last panel {last.max():.3g})"
        )

    def real(x):
        out = np.empty(x.shape[0])
        for i in range(0, x.shape[0], CHUNK):
            g, wt = _tail_terms(psi.eval, w.w, x[i : i + CHUNK, 0])
            out[i : i + CHUNK] = g @ wt
        return out

    cplx = None
    if psi.has_complex:

        def cplx(z):
            out = np.empty(z.shape[0], dtype=complex)
            for i in range(0, z.shape[0], CHUNK):
                g, wt = _tail_terms(psi.eval_complex, w.w, z[i : i + CHUNK, 0])
                out[i : i + CHUNK] = g @ wt
            return out

    return FunctionHandle(
        1,
        real,
        cplx,
        {"op": "tailint", "weight": w.to_json(), "args": [psi.provenance]},
        psi.lower,
        # the fixed tau rule makes the quadrature error a smooth function of s, so
        # only rounding counts as noise for difference tests; tol is accuracy.
        # +0.5 per level matches the rounding measured on the Li_p chain.
        psi.noise * 10,
        rel_noise=psi.rel_noise + 0.5,
    )


# ---------------------------------------------------------------------------
# divided-difference lift


def _divided_integral(measure, z1, z2, tol):
    """int ((e^{z1 u} - e^{z2 u})/(z1 - z2) - u) dmu(u) for a 1-D measure."""
    if isinstance(measure, SumMeasure):
        return sum(_divided_integral(p, z1, z2, tol / len(measure.parts)) for p in measure.parts)
    if isinstance(measure, (Atoms, GridDensity)):
        a = measure.as_atoms()
        u = a.points[:, 0]
        hi, lo = (z1, z2) if z1.real >= z2.real else (z2, z1)
        d = lo - hi
        if d == 0:
            dd = u * np.exp(hi * u)
        else:
            dd = np.exp(hi * u) * np.expm1(d * u) / d
        return np.sum(a.weights * (dd - u))
    if isinstance(measure, Parametric):
        c = float(measure.direction[0])
        val, err = family_integral(measure.family, _divided_kernel(complex(z1 * c), complex(z2 * c)), tol)
        if err > tol:
            raise QuadratureError(f"lift quadrature error {err:.3g} exceeds {tol:.3g}", err)
        return c * val
    raise TypeError(f"unsupported measure {type(measure).__name__}")


def atomize(measure, count=1000):
    """Replace a 1-D parametric measure by ``count`` atoms.

    Gauss nodes on log-spaced panels cover [eps0, U]; the pieces below eps0
    and above U become single atoms matching their mass/first moments (so
    fewer atoms come back when a piece is empty).
    """
    if isinstance(measure, (Atoms, GridDensity)):
        return measure.as_atoms()
    if isinstance(measure, SumMeasure):
        parts = [atomize(p, max(10, count // len(measure.parts))) for p in measure.parts]
        return Atoms(np.vstack([p.points for p in parts]), np.concatenate([p.weights for p in parts]))
    if not isinstance(measure, Parametric) or measure.dim != 1:
        raise TypeError("atomize handles 1-D measures only")
    fam: Family = measure.family
    c = float(measure.direction[0])
    upper = 1.0
    while (fam.tail_mass(upper) > 1e-13 or fam.first_moment_above(upper) > 1e-13) and upper < 1e8:
        upper *= 2
    eps0 = 1e-9
    per = 10
    inner = max(per, count - 2)
    panels = inner // per
    sizes = [per] * panels
    sizes[-1] += inner - per * panels
    edges = np.geomspace(eps0, upper, panels + 1)
    pts, wts = [], []
    for a, b, n in zip(edges[:-1], edges[1:], sizes):
        u, w = panel_nodes(a, b, n)
        pts.append(u)
        wts.append(w * fam.density(u))
    m1, m2 = fam.first_moment_below(eps0), fam.second_moment_below(eps0)
    if m1 > 0:
        pts.append([m2 / m1])
        wts.append([m1 * m1 / m2])
    tail = fam.tail_mass(upper)
    if tail > 0 and math.isfinite(fam.first_moment_above(upper)):
        pts.append([fam.first_moment_above(upper) / tail])
        wts.append([tail])
    return Atoms(c * np.concatenate(pts)[:, None], np.concatenate(wts))


def pushforward(atoms, nodes=32):
    """2-D atoms for the image of dmu1(v) dw on |w| <= v under ((v+w)/2, (v-w)/2), times 1/2."""
    x, gw = gauss_legendre(nodes)
    v = atoms.points[:, 0][:, None]
    wv = atoms.weights[:, None]
    w = v * x[None, :]
    u1 = 0.5 * (v + w)
    u2 = 0.5 * (v - w)
    weight = 0.5 * wv * v * gw[None, :]
    pts = np.column_stack([u1.ravel(), u2.ravel()])
    keep = weight.ravel() > 0
    return Atoms(pts[keep], weight.ravel()[keep])


@dataclass
class LiftResult:
    handle: FunctionHandle
    omega: float
    triple: LevyTriple = None
    source: LevyTriple = None


def divided_difference_lift(psi1, atoms=1000, nodes=32, tol=1e-12):
    """(psi1(s1) - psi1(s2))/(s1 - s2) - omega, with omega = int u dmu1.

    Computed as one integral of the stable kernel
    e^{s2 u} expm1((s1-s2) u)/(s1-s2) - u against mu1; arguments are put in a
    canonical order first so that the result is exactly symmetric. Within
    1e-6 of the diagonal the kernel is evaluated at the midpoint with
    s1 = s2, i.e. psi1' - omega.
    """
    if not isinstance(psi1, LevyTriple) or psi1.dim != 1:
        raise ConstructionError("the lift takes a one-dimensional Levy triple")
    psi1.require_valid()
    if any(c != 0 for c in psi1.c1):
        raise ConstructionError("the lift is defined for triples without drift (c1 = 0)")
    omega = float(np.sum(psi1.measure.total_first_moment()))
    if not math.isfinite(omega):
        raise ConstructionError("omega = int u dmu1 is infinite")
    mu = psi1.measure

    def value(a, b):
        if (a.real, a.imag) < (b.real, b.imag):
            a, b = b, a
        if abs(a - b) < DIAGONAL_GAP:
            a = b = 0.5 * (a + b)
        return _divided_integral(mu, a, b, tol)

    def real(x):
        return np.array([value(complex(a), complex(b)).real for a, b in x])

    def cplx(z):
        return np.array([complex(value(complex(a), complex(b))) for a, b in z])

    # the quadrature error is a smooth bias (~5e-14 for the log family); its rough,
    # point-to-point part measures a few ulps of max|psi|, hence a relative model
    handle = FunctionHandle(
        2, real, cplx, {"op": "lift2", "args": [{"triple": psi1.to_json()}]}, noise=1e-16, rel_noise=4.0
    )
    at = atomize(mu, atoms)
    push = LevyTriple(2, 0.0, (0.0, 0.0), pushforward(at, nodes), psi1.delta)
    handle.triple = push
    return LiftResult(handle, omega, push, psi1)
