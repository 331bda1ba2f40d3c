"""Monte Carlo link between T_n and Markov processes on R_+^n.

A triple is simulated as drift + compound Poisson jumps + killing:

    X_t = t (c1 + m_eps) + sum of N_t jumps,  N_t ~ Poisson(t * mu(|u|_inf >= eps)),

jumps drawn from mu restricted to |u|_inf >= eps and normalized, m_eps the
first moment of the small jumps, and the path killed with probability
1 - exp(t c0). Then E[exp(s.X_t); alive] = exp(t psi_eps(s)) where psi_eps
differs from psi only by the integral of exp(s.u) - 1 - s.u over small jumps.

Random numbers come from Philox streams keyed by (seed, time index, block
index), so the sample matrix does not depend on how blocks are scheduled.
"""

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.interpolate import PchipInterpolator

from .representation import (
    Atoms,
    GridDensity,
    Parametric,
    SumMeasure,
    evaluate_real,
    family_small_jump_bias,
)

BLOCK = 8192
SPLINE_KNOTS = 2048


class SamplingError(ValueError):
    pass


@dataclass
class SimPlan:
    triple: object
    times: tuple = (0.5, 1.0, 2.0)
    probes: object = None
    samples: int = 100_000
    eps: float = 1e-3
    seed: int = 0

    def __post_init__(self):
        self.triple.require_valid()
        self.times = tuple(float(t) for t in self.times)
        if not self.times or any(t <= 0 for t in self.times):
            raise ValueError("times must be positive")
        n = self.triple.dim
        if self.probes is None:
            self.probes = standard_probes(n)
        self.probes = np.atleast_2d(np.asarray(self.probes, dtype=float))
        if n == 1 and self.probes.shape[0] == 1 and self.probes.shape[1] != 1:
            self.probes = self.probes.T
        if self.probes.shape[1] != n or not np.all(self.probes < 0):
            raise ValueError(f"probes must be strictly negative {n}-vectors")
        if self.samples < 100:
            raise ValueError("need at least 100 samples")
        if not self.eps > 0:
            raise ValueError("cutoff must be positive")


def standard_probes(n):
    axis = [-0.5, -1.0, -2.0]
    mesh = np.meshgrid(*[axis] * n, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


# ---------------------------------------------------------------------------
# decomposition of the measure into a sampleable part and a drift


class _AtomJumps:
    def __init__(self, points, weights):
        self.points = points
        self.cdf = np.cumsum(weights) / np.sum(weights)
        self.rate = float(np.sum(weights))

    def draw(self, rng, k):
        idx = np.searchsorted(self.cdf, rng.random(k), side="right")
        return self.points[np.minimum(idx, len(self.cdf) - 1)]


class _FamilyJumps:
    """Inverse-CDF sampling of a family restricted to v >= cut.

    With q = log T(cut) - log T(v), q is Exp(1) distributed; a monotone spline
    through 2048 knots maps q to log v.
    """

    def __init__(self, family, direction, cut):
        try:
            t0 = family.tail_mass(cut)
        except NotImplementedError:
            raise SamplingError(f"family {family.name} has no tail-mass formula; atomize the measure first") from None
        self.rate = float(t0)
        self.direction = direction
        top = cut
        while family.tail_mass(top) > 1e-14 * t0 and top < cut * 1e40:
            top *= 10.0
        v = np.geomspace(cut, top, SPLINE_KNOTS)
        tails = np.array([family.tail_mass(x) for x in v])
        keep = np.concatenate([[True], np.diff(tails) < 0]) & (tails > 0)
        v, tails = v[keep], tails[keep]
        q = np.log(t0) - np.log(tails)
        self.qmax = float(q[-1])
        self.spline = PchipInterpolator(q, np.log(v))

    def draw(self, rng, k):
        q = np.minimum(rng.standard_exponential(k), self.qmax)
        return np.exp(self.spline(q))[:, None] * self.direction[None, :]


def _leaves(m):
    if isinstance(m, SumMeasure):
        for p in m.parts:
            yield from _leaves(p)
    else:
        yield m


def decompose(measure, eps):
    """Split mu at |u|_inf = eps into jump components and a compensating drift."""
    comps = []
    drift = np.zeros(measure.dim)
    for leaf in _leaves(measure):
        if isinstance(leaf, (Atoms, GridDensity)):
            a = leaf.as_atoms()
            big = np.max(a.points, axis=1) >= eps if len(a) else np.zeros(0, bool)
            drift += a.weights[~big] @ a.points[~big]
            if np.any(big & (a.weights > 0)):
                sel = big & (a.weights > 0)
                comps.append(_AtomJumps(a.points[sel], a.weights[sel]))
        elif isinstance(leaf, Parametric):
            cut = eps / leaf.direction.max()
            drift += leaf.direction * leaf.family.first_moment_below(cut)
            comps.append(_FamilyJumps(leaf.family, leaf.direction, cut))
        else:
            raise SamplingError(f"no sampler for measure kind {getattr(leaf, 'kind', type(leaf).__name__)}")
    return comps, drift


def truncation_bias(triple, s, eps):
    """psi(s) - psi_eps(s): small-jump part of exp(s.u) - 1 - s.u."""
    s = np.asarray(s, dtype=float)
    total = 0.0
    for leaf in _leaves(triple.measure):
        if isinstance(leaf, (Atoms, GridDensity)):
            a = leaf.as_atoms()
            if not len(a):
                continue
            small = np.max(a.points, axis=1) < eps
            x = a.points[small] @ s
            total += np.sum(a.weights[small] * (np.expm1(x) - x))
        else:
            zeta = complex(np.dot(s, leaf.direction))
            total += family_small_jump_bias(leaf.family, zeta, eps / leaf.direction.max()).real
    return float(total)


def psi_eps(triple, s, eps, tol=None):
    return evaluate_real(triple, s, tol) - truncation_bias(triple, s, eps)


# ---------------------------------------------------------------------------
# sampling


@dataclass
class SampleSet:
    plan: SimPlan
    increments: list  # per time: (M, n) array
    alive: list  # per time: (M,) bool
    drift: np.ndarray
    jump_rate: float


def _block(plan, comps, rates, drift, ti, b):
    t = plan.times[ti]
    n = plan.triple.dim
    lo = b * BLOCK
    size = min(BLOCK, plan.samples - lo)
    ss = np.random.SeedSequence([plan.seed, ti, b])
    rng = np.random.Generator(np.random.Philox(ss))
    alive = rng.random(size) < math.exp(t * plan.triple.c0)
    X = np.tile(t * (np.asarray(plan.triple.c1) + drift), (size, 1))
    total_rate = float(np.sum(rates))
    if total_rate > 0:
        counts = rng.poisson(t * total_rate, size)
        k = int(counts.sum())
        if k:
            owner = np.repeat(np.arange(size), counts)
            which = np.searchsorted(np.cumsum(rates) / total_rate, rng.random(k), side="right")
            which = np.minimum(which, len(comps) - 1)
            jumps = np.empty((k, n))
            for c, comp in enumerate(comps):
                sel = which == c
                if np.any(sel):
                    jumps[sel] = comp.draw(rng, int(sel.sum()))
            for j in range(n):
                X[:, j] += np.bincount(owner, weights=jumps[:, j], minlength=size)
    return X, alive


def sample_increments(plan, workers=1):
    """Increments X_t for every t in the plan, with survival indicators."""
    comps, drift = decompose(plan.triple.measure, plan.eps)
    rates = np.array([c.rate for c in comps])
    nblocks = -(-plan.samples // BLOCK)
    jobs = [(ti, b) for ti in range(len(plan.times)) for b in range(nblocks)]
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            parts = list(ex.map(lambda job: _block(plan, comps, rates, drift, *job), jobs))
    else:
        parts = [_block(plan, comps, rates, drift, *job) for job in jobs]
    xs, alive = [], []
    for ti in range(len(plan.times)):
        chunk = parts[ti * nblocks : (ti + 1) * nblocks]
        xs.append(np.vstack([c[0] for c in chunk]))
        alive.append(np.concatenate([c[1] for c in chunk]))
    return SampleSet(plan, xs, alive, drift, float(rates.sum()))


# ---------------------------------------------------------------------------
# estimators and checks


@dataclass
class EmpiricalLaplace:
    times: tuple
    probes: np.ndarray
    g_hat: np.ndarray  # (T, S)
    stderr: np.ndarray
    log_g: np.ndarray
    log_stderr: np.ndarray
    samples: int

    def index(self, t):
        for i, u in enumerate(self.times):
            if abs(u - t) <= 1e-12 * max(1.0, abs(t)):
                return i
        raise KeyError(f"time {t} was not simulated")


def empirical_laplace(samples, probes=None):
    """g_t(s) estimated by the mean of alive * exp(s.X_t); killed paths count as 0.

    Means use exactly rounded sums, so they do not depend on summation order.
    """
    probes = samples.plan.probes if probes is None else np.atleast_2d(np.asarray(probes, dtype=float))
    T, S = len(samples.increments), probes.shape[0]
    g = np.empty((T, S))
    se = np.empty((T, S))
    for i, (X, alive) in enumerate(zip(samples.increments, samples.alive)):
        vals = np.exp(X @ probes.T) * alive[:, None]
        # exactly rounded column sums: constant columns average to themselves
        g[i] = [math.fsum(col) / X.shape[0] for col in vals.T]
        se[i] = np.std(vals, axis=0, ddof=1) / math.sqrt(X.shape[0])
    with np.errstate(divide="ignore", invalid="ignore"):
        log_g = np.log(g)
        log_se = se / g
    return EmpiricalLaplace(samples.plan.times, probes, g, se, log_g, log_se, samples.plan.samples)


def _slack(x):
    return 1e-12 * (1.0 + abs(x))


@dataclass
class ExponentRow:
    t: float
    s: tuple
    g_hat: float
    stderr: float
    log_g: float
    log_stderr: float
    t_psi_eps: float
    t_psi: float
    status: str  # pass | fail | insufficient

    @property
    def passed(self):
        return self.status == "pass"


@dataclass
class ExponentReport:
    rows: list
    eps: float
    samples: int
    seed: int
    semigroup: list = field(default_factory=list)

    @property
    def passed(self):
        return all(r.passed for r in self.rows) and all(r["pass"] for r in self.semigroup)

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        w.writerow(["t", "s", "g_hat", "stderr", "t_psi_eps", "t_psi", "pass"])
        for r in self.rows:
            w.writerow(
                [
                    repr(r.t),
                    ";".join(repr(x) for x in r.s),
                    repr(r.g_hat),
                    repr(r.stderr),
                    repr(r.t_psi_eps),
                    repr(r.t_psi),
                    r.status,
                ]
            )
        return buf.getvalue()


def verify_exponent(plan, triple=None, samples=None, est=None, tol=None):
    """Compare log g_hat_t(s) with t psi_eps(s) at 3 delta-method sigma; add the semigroup check."""
    triple = plan.triple if triple is None else triple
    if triple is not plan.triple and triple.to_json() != plan.triple.to_json():
        raise ValueError("plan was built for a different triple")
    if est is None:
        est = empirical_laplace(sample_increments(plan) if samples is None else samples)
    rows = []
    for i, t in enumerate(plan.times):
        for k, s in enumerate(est.probes):
            pe = psi_eps(triple, s, plan.eps, tol)
            ps = evaluate_real(triple, s, tol)
            g, se, lg, lse = est.g_hat[i, k], est.stderr[i, k], est.log_g[i, k], est.log_stderr[i, k]
            if not g > 0:
                status = "insufficient"
            else:
                ok = abs(lg - t * pe) <= 3 * lse + _slack(t * pe)
                status = "pass" if ok else "fail"
            rows.append(ExponentRow(t, tuple(float(x) for x in s), float(g), float(se), float(lg), float(lse), t * pe, t * ps, status))
    report = ExponentReport(rows, plan.eps, plan.samples, plan.seed)
    if any(abs(2 * t - u) < 1e-12 for t in plan.times for u in plan.times):
        report.semigroup = power_scaling_check(plan, 2, est=est).rows
    return report


@dataclass
class ScalingReport:
    a: Fraction
    rows: list

    @property
    def passed(self):
        return bool(self.rows) and all(r["pass"] for r in self.rows)


def power_scaling_check(plan, a, samples=None, est=None):
    """g_hat_{a t}(s) against g_hat_t(s)^a for every t with a t also simulated."""
    a = Fraction(a).limit_denominator(10**6)
    if a <= 0:
        raise ValueError("a must be a positive rational")
    if est is None:
        est = empirical_laplace(sample_increments(plan) if samples is None else samples)
    rows = []
    af = float(a)
    for t in plan.times:
        try:
            j = est.index(af * t)
        except KeyError:
            continue
        i = est.index(t)
        for k, s in enumerate(est.probes):
            g1, se1 = est.g_hat[i, k], est.stderr[i, k]
            g2, se2 = est.g_hat[j, k], est.stderr[j, k]
            pred = g1**af
            sigma = math.sqrt(se2**2 + (af * g1 ** (af - 1) * se1) ** 2) if g1 > 0 else math.inf
            if i == j:
                sigma = 0.0
            diff = abs(g2 - pred)
            rows.append(
                {
                    "t": t,
                    "at": af * t,
                    "s": [float(x) for x in s],
                    "g_at": float(g2),
                    "g_t_pow_a": float(pred),
                    "sigma": float(sigma),
                    "pass": bool(diff <= 3 * sigma + _slack(pred)),
                }
            )
    if not rows:
        raise ValueError(f"no pair (t, {a} t) in the simulated time grid {plan.times}")
    return ScalingReport(a, rows)
