"""Numerical necessary-condition tests for membership in T_n.

Derivatives are replaced by forward differences on a lattice. A smooth
absolutely monotone function has nonnegative forward differences of every
order, so a difference that is negative beyond the rounding floor is a
genuine witness against membership. Passing is only evidence, never proof.
"""

import itertools
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .representation import evaluate_complex, evaluate_real

EPS = np.finfo(float).eps
ORDER_CAP = 6
REJECT_FACTOR = 3.0
DEFAULT_RESOLUTION = 1e-2
NOTE = "numerical necessary-condition check; acceptance is evidence, not a proof of membership"


class EvaluationFailure(RuntimeError):
    def __init__(self, point, cause):
        super().__init__(f"evaluation failed at {point}: {cause}")
        self.point = point


@dataclass
class MembershipReport:
    verdict: str  # accept | reject | inconclusive
    max_order: int
    grid: dict
    noise_floor: list
    violation: dict = None
    test: str = "verify_Tn"
    note: str = NOTE

    @property
    def accepted(self):
        return self.verdict == "accept"

    def to_json(self):
        return asdict(self)


def default_grid(arity, lower=-8.0, upper=-0.05):
    npts = {1: 16, 2: 6, 3: 4}.get(arity, 3)
    axis = -np.geomspace(-lower, -upper, npts)
    return [axis] * arity


def default_step(grid, max_order):
    nearest = min(abs(float(np.max(ax))) for ax in grid)
    return min(0.05, nearest / (2 * max_order))


def _normalize_grid(grid, arity):
    if grid is None:
        return default_grid(arity)
    grid = [np.sort(np.atleast_1d(np.asarray(ax, dtype=float))) for ax in grid]
    if len(grid) == 1 and arity > 1:
        grid = grid * arity
    if len(grid) != arity:
        raise ValueError(f"grid has {len(grid)} axes for a function of {arity} variables")
    return grid


def _multi_indices(n, order):
    """All alpha in N^n with |alpha| == order."""
    for combo in itertools.combinations_with_replacement(range(n), order):
        alpha = [0] * n
        for j in combo:
            alpha[j] += 1
        yield tuple(alpha)


def _lattice_values(fn, grid, K, h):
    """fn on points grid[j][i_j] + k_j h, k_j = 0..K; returns array (N_1..N_n, K+1..K+1)."""
    n = len(grid)
    ext = [ax[:, None] + h * np.arange(K + 1)[None, :] for ax in grid]
    mesh = np.meshgrid(*[e.ravel() for e in ext], indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=1)
    vals = np.asarray(fn(pts), dtype=float)
    shape = []
    for ax in grid:
        shape += [len(ax), K + 1]
    vals = vals.reshape(shape)
    # (N1, K1, N2, K2, ...) -> (N1, N2, ..., K1, K2, ...)
    perm = list(range(0, 2 * n, 2)) + list(range(1, 2 * n, 2))
    return np.transpose(vals, perm), pts


def _difference_test(fn, arity, grid, max_order, h, noise, resolution, sign, test):
    grid = _normalize_grid(grid, arity)
    if max_order < 1:
        raise ValueError("max_order must be at least 1")
    h = default_step(grid, max_order) if h is None else float(h)
    if not h > 0:
        raise ValueError("step must be positive")
    top = max(float(np.max(ax)) for ax in grid) + max_order * h
    if top >= 0:
        raise ValueError(f"grid shifted by max_order*h reaches {top:.3g}; it must stay in (-inf, 0)")
    tested = min(max_order, ORDER_CAP)
    vals, _ = _lattice_values(fn, grid, tested, h)
    n = arity
    if callable(noise):
        noise = noise(vals)
    if not np.all(np.isfinite(vals)):
        bad = np.argwhere(~np.isfinite(vals))[0]
        raise EvaluationFailure(_location(grid, bad[:n], bad[n:], h), "non-finite value")
    scale = float(np.max(np.abs(vals))) if vals.size else 0.0
    base = EPS * scale + noise
    spec = {
        "axes": [ax.tolist() for ax in grid],
        "step": h,
        "requested_order": max_order,
        "resolution": resolution,
    }
    floors = [base * 2**k / h**k for k in range(tested + 1)]

    origin = (slice(None),) * n + (0,) * n
    f0 = vals[origin]
    # order 0: sign condition on the function itself
    bad0 = sign * f0 < -REJECT_FACTOR * floors[0]
    if np.any(bad0):
        idx = _worst(sign * f0, bad0)
        violation = {
            "order": [0] * n,
            "location": _location(grid, idx, (0,) * n, 0.0),
            "value": float(f0[idx]),
            "noise": floors[0],
            "kind": "sign",
        }
        return MembershipReport("reject", 0, spec, floors, violation, test)

    for order in range(1, tested + 1):
        for alpha in _multi_indices(n, order):
            d = vals
            for j, a in enumerate(alpha):
                if a:
                    d = np.diff(d, n=a, axis=n + j)
            d = d[origin] / h**order
            bad = d < -REJECT_FACTOR * floors[order]
            if np.any(bad):
                idx = _worst(d, bad)
                violation = {
                    "order": list(alpha),
                    "location": _location(grid, idx, (0,) * n, h),
                    "value": float(d[idx]),
                    "noise": floors[order],
                    "kind": "difference",
                }
                return MembershipReport("reject", order, spec, floors, violation, test)

    honest = tested == max_order and floors[tested] <= resolution * max(scale, EPS)
    return MembershipReport("accept" if honest else "inconclusive", tested, spec, floors, None, test)


def _worst(values, mask):
    masked = np.where(mask, values, np.inf)
    return np.unravel_index(int(np.argmin(masked)), values.shape)


def _location(grid, idx, offset, h):
    return [float(grid[j][int(i)]) for j, i in enumerate(idx)]


def verify_Tn(f, grid=None, max_order=5, h=None, resolution=DEFAULT_RESOLUTION):
    """Sign and forward-difference test of membership in T_n on a lattice.

    Checks f <= 0 and Delta^alpha f >= 0 for 1 <= |alpha| <= max_order, with
    a rounding floor eps*max|f|*2^k/h^k (plus the handle's declared noise).
    Orders whose floor exceeds ``resolution * max|f|`` or the cap of 6 make
    an otherwise clean run inconclusive.
    """
    def noise(vals):
        return f.noise + f.rel_noise * EPS * float(np.max(np.abs(vals)))

    return _difference_test(f.eval, f.arity, grid, max_order, h, noise, resolution, -1.0, "verify_Tn")


def exponential_criterion(f, v, grid=None, max_order=5, h=None, resolution=DEFAULT_RESOLUTION):
    """Difference test on exp(v * f), which is absolutely monotone when f is in T_n."""
    if not v > 0:
        raise ValueError("v must be positive")

    seen = {}

    def g(x):
        fx = f.eval(x)
        gx = np.exp(v * fx)
        # an error d in f moves exp(v f) by about v exp(v f) d
        seen["noise"] = v * float(np.max(gx * (f.noise + f.rel_noise * EPS * np.abs(fx)))) if fx.size else 0.0
        return gx

    rep = _difference_test(g, f.arity, grid, max_order, h, lambda _: seen["noise"], resolution, 1.0, "exponential_criterion")
    rep.grid["v"] = v
    return rep


# ---------------------------------------------------------------------------
# sector test


@dataclass
class SectorSpec:
    theta: float
    samples: int = 10_000
    s_range: tuple = (-8.0, -0.05)
    boundary_fraction: float = 0.5

    def __post_init__(self):
        if not 0 < self.theta <= math.pi:
            raise ValueError("theta must lie in (0, pi]")
        lo, hi = self.s_range
        if not lo < hi < 0:
            raise ValueError("sampling rectangle must satisfy lo < hi < 0")

    @property
    def slope(self):
        """cot(theta/2): |y_j| <= slope * (-s_j) describes S_theta."""
        return 0.0 if self.theta == math.pi else 1.0 / math.tan(self.theta / 2)

    def contains(self, z):
        s, y = np.real(z), np.imag(z)
        return bool(np.all(s < 0) and np.all(np.abs(y) <= self.slope * (-s) * (1 + 1e-12)))


@dataclass
class SectorReport:
    theta: float
    samples: int
    bound: float
    violations: int
    max_ratio: float
    identically_zero: bool
    worst: list = field(default_factory=list)

    @property
    def passed(self):
        return self.violations == 0 and not self.identically_zero

    def to_json(self):
        d = asdict(self)
        d["passed"] = self.passed
        return d


def sample_sector(spec, arity, seed=0):
    rng = np.random.default_rng(seed)
    lo, hi = spec.s_range
    m = spec.samples
    s = -np.exp(rng.uniform(np.log(-hi), np.log(-lo), size=(m, arity)))
    frac = rng.uniform(0.0, 1.0, size=(m, arity))
    frac[: int(round(spec.boundary_fraction * m))] = 1.0
    sign = rng.choice([-1.0, 1.0], size=(m, arity))
    y = sign * frac * spec.slope * (-s)
    return s + 1j * y


def _eval_complex_located(f, z):
    try:
        return f.eval_complex(z)
    except Exception as exc:  # locate the offending point
        for row in z:
            try:
                f.eval_complex(row[None, :])
            except Exception as inner:
                raise EvaluationFailure(row.tolist(), inner) from inner
        raise EvaluationFailure(None, exc) from exc


def sector_check(f, spec, seed=0, tol=1e-9):
    """Check Re psi <= tol and |Im psi| <= cot(theta/2)(-Re psi) + tol on sampled S_theta^n."""
    z = sample_sector(spec, f.arity, seed)
    w = _eval_complex_located(f, z)
    re, im = w.real, w.imag
    if np.all(np.abs(w) <= tol):
        return SectorReport(spec.theta, spec.samples, spec.slope, 0, 0.0, True)
    bad = (re > tol) | (np.abs(im) > spec.slope * (-re) + tol)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(-re > 0, np.abs(im) / (-re), np.where(np.abs(im) > 0, np.inf, 0.0))
    order = np.argsort(-ratio)[:5]
    worst = [{"z": [[float(c.real), float(c.imag)] for c in z[i]], "psi": [float(re[i]), float(im[i])]} for i in order]
    return SectorReport(spec.theta, spec.samples, spec.slope, int(bad.sum()), float(ratio.max()), False, worst)


# ---------------------------------------------------------------------------
# real-part inequality for triples


@dataclass
class LemmaReport:
    samples: int
    violations: int
    min_margin: float
    mean_margin: float
    tolerance: float
    worst: dict = None

    @property
    def passed(self):
        return self.violations == 0

    def to_json(self):
        d = asdict(self)
        d["passed"] = self.passed
        return d


def lemma_samples(dim, count, seed=0, s_range=(-8.0, -0.05), y_max=10.0):
    rng = np.random.default_rng(seed)
    lo, hi = s_range
    s = -np.exp(rng.uniform(np.log(-hi), np.log(-lo), size=(count, dim)))
    r = -np.exp(rng.uniform(np.log(-hi), np.log(-lo), size=(count, dim)))
    y = rng.uniform(-y_max, y_max, size=(count, dim))
    return list(zip(s, r, y))


def lemma_inequality_check(t, samples=None, seed=0, tol=None):
    """Re psi(s+iy) - psi(s) >= 2 (Re psi(r+iy) - c0 - c1.r) for a validated triple."""
    t.require_valid()
    if samples is None:
        samples = lemma_samples(t.dim, 1000, seed)
    tol = t.tol if tol is None else tol
    slack = 4 * tol
    c1 = np.asarray(t.c1)
    margins = []
    worst = None
    for s, r, y in samples:
        s, r, y = (np.atleast_1d(np.asarray(a, dtype=float)) for a in (s, r, y))
        lhs = evaluate_complex(t, s + 1j * y, tol).real - evaluate_real(t, s, tol)
        rhs = 2 * (evaluate_complex(t, r + 1j * y, tol).real - t.c0 - c1 @ r)
        m = lhs - rhs
        margins.append(m)
        if worst is None or m < worst["margin"]:
            worst = {"s": s.tolist(), "r": r.tolist(), "y": y.tolist(), "lhs": lhs, "rhs": rhs, "margin": m}
    margins = np.array(margins)
    return LemmaReport(len(margins), int(np.sum(margins < -slack)), float(margins.min()), float(margins.mean()), slack, worst)


# ---------------------------------------------------------------------------
# convergence probe


@dataclass
class Compact:
    """Rectangle {re_lo <= Re z_j <= re_hi, im_lo <= Im z_j <= im_hi} inside {Re z < 0}."""

    re_lo: float
    re_hi: float
    im_lo: float = 0.0
    im_hi: float = 0.0

    def __post_init__(self):
        if not self.re_lo <= self.re_hi < 0:
            raise ValueError("compact must lie strictly inside Re z < 0")
        if self.im_lo > self.im_hi:
            raise ValueError("empty imaginary range")

    def mesh(self, arity, points=None):
        points = points or {1: 201, 2: 21}.get(arity, 9)
        re = np.linspace(self.re_lo, self.re_hi, points)
        if self.im_hi > self.im_lo:
            im = np.linspace(self.im_lo, self.im_hi, max(3, points // 4))
            axis = (re[:, None] + 1j * im[None, :]).ravel()
        else:
            axis = re
        mesh = np.meshgrid(*[axis] * arity, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)


@dataclass
class ConvergenceReport:
    k: list
    gaps: list
    decreasing: bool
    final_gap: float
    tol: float
    limit_report: MembershipReport

    @property
    def passed(self):
        ok = self.decreasing and self.limit_report.verdict == "accept"
        return ok and (self.tol is None or self.final_gap <= self.tol)

    def to_json(self):
        d = asdict(self)
        d["passed"] = self.passed
        return d


def convergence_probe(seq, limit, compact, k_list=None, tol=None, points=None, verify_kwargs=None):
    """Sup-norm gaps between members of a sequence and the limit on a compact mesh."""
    arities = {f.arity for f in seq} | {limit.arity}
    if len(arities) != 1:
        raise ValueError("all handles must share one arity")
    k_list = list(range(1, len(seq) + 1)) if k_list is None else list(k_list)
    if len(k_list) != len(seq):
        raise ValueError("k_list and seq differ in length")
    z = compact.mesh(limit.arity, points)
    cplx = np.iscomplexobj(z)
    ev = (lambda f: _eval_complex_located(f, z)) if cplx else (lambda f: f.eval(z.real))
    ref = ev(limit)
    gaps = [float(np.max(np.abs(ev(f) - ref))) for f in seq]
    slack = 1e-12 * (1 + max(gaps, default=0.0))
    decreasing = all(b <= a + slack for a, b in zip(gaps, gaps[1:]))
    limit_report = verify_Tn(limit, **(verify_kwargs or {}))
    return ConvergenceReport(k_list, gaps, decreasing, gaps[-1] if gaps else 0.0, tol, limit_report)
