"""Levy-triple model of negative Bernstein functions and its quadrature.

A member of T_n is stored as (c0, c1, mu) and evaluated as

    psi(z) = c0 + c1.z + integral of (exp(z.u) - 1) mu(du),   Re z < 0.

Measures come in three flavours (atoms, gridded density, parametric family
laid along a ray) plus finite sums of those.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .families import Family, family_from_json
from .quadrature import QuadratureError, panel_nodes

__all__ = [
    "Atoms",
    "DomainPoint",
    "GridDensity",
    "IntegrabilityError",
    "LevyTriple",
    "Parametric",
    "QuadratureError",
    "StructuralError",
    "SumMeasure",
    "ValidationReport",
    "combine_triples",
    "default_tol",
    "evaluate_complex",
    "evaluate_real",
    "gradient",
    "measure_from_json",
    "shift_normalize",
    "triple_from_json",
    "validate_triple",
]

GAUSS_NODES = 20
PANEL_BUDGET = 400


class StructuralError(ValueError):
    """Malformed measure: negative weight, atom at the origin, bad shapes."""


class IntegrabilityError(ValueError):
    """The measure violates the moment conditions of the representation."""


def default_tol(dim):
    return 1e-9 if dim == 1 else 1e-7


# ---------------------------------------------------------------------------
# one-dimensional kernels for parametric families


@dataclass(frozen=True)
class _Kernel:
    near: object  # full kernel, evaluated on (0, x0]
    far: object  # decaying part on [x0, inf)
    lin: complex  # kernel ~ lin * u as u -> 0
    quad: float  # bound on the u**2 coefficient, for the remainder estimate
    mass_coef: float  # far constant part: mass_coef * T(x0) + moment_coef * M1_above(x0)
    moment_coef: float
    rate: float  # decay rate of `far` (> 0)
    freq: float  # oscillation frequency of `far`


def _psi_kernel(zeta):
    return _Kernel(
        near=lambda u: np.expm1(zeta * u),
        far=lambda u: np.exp(zeta * u),
        lin=zeta,
        quad=0.5 * abs(zeta) ** 2,
        mass_coef=-1.0,
        moment_coef=0.0,
        rate=-zeta.real,
        freq=abs(zeta.imag),
    )


def _grad_kernel(zeta):
    f = lambda u: u * np.exp(zeta * u)  # noqa: E731
    return _Kernel(f, f, 1.0, abs(zeta), 0.0, 0.0, -zeta.real, abs(zeta.imag))


def _divided_kernel(z1, z2):
    """Kernel (exp(z1 u) - exp(z2 u))/(z1 - z2) - u, diagonal by continuity."""
    # anchor at the argument with the larger real part so that expm1 stays bounded
    a, b = (z1, z2) if z1.real >= z2.real else (z2, z1)
    d = b - a
    if d == 0:
        dd = lambda u: u * np.exp(a * u)  # noqa: E731
    else:
        dd = lambda u: np.exp(a * u) * np.expm1(d * u) / d  # noqa: E731
    return _Kernel(
        near=lambda u: dd(u) - u,
        far=dd,
        lin=0.0,
        quad=0.5 * (abs(z1) + abs(z2)),
        mass_coef=0.0,
        moment_coef=-1.0,
        rate=-max(z1.real, z2.real),
        freq=max(abs(z1.imag), abs(z2.imag)),
    )


def _near_integral(fam, kernel, x0, tol, f_near=None):
    """Integrate kernel.near * density over (0, x0] on panels shrinking by 4."""
    near = kernel.near if f_near is None else f_near
    total = 0.0
    a = x0
    for k in range(PANEL_BUDGET):
        lo = 0.25 * a
        u, w = panel_nodes(lo, a, GAUSS_NODES)
        total += np.dot(w, near(u) * fam.density(u))
        a = lo
        remainder_err = kernel.quad * fam.second_moment_below(a)
        if k >= 1 and remainder_err < tol / 8:
            return total + kernel.lin * fam.first_moment_below(a), remainder_err
    raise QuadratureError("near-zero panels did not converge", kernel.quad * fam.second_moment_below(a))


def _far_integral(fam, kernel, x0, tol):
    total = 0.0
    a = x0
    for k in range(PANEL_BUDGET):
        b = 2.0 * a
        m = int(max(1, math.ceil(kernel.freq * (b - a) / 6.0), math.ceil(kernel.rate * (b - a) / 10.0)))
        m = min(m, 4096)
        edges = np.linspace(a, b, m + 1)
        u, w = panel_nodes(edges[:-1, None], edges[1:, None], GAUSS_NODES)
        dens = fam.density(u)
        vals = kernel.far(u) * dens
        val = np.sum(vals * w)
        size = np.sum(np.abs(vals) * w)
        total += val
        a = b
        if k >= 2 and size < tol / 8:
            const = 0.0
            if kernel.mass_coef:
                const += kernel.mass_coef * fam.tail_mass(x0)
            if kernel.moment_coef:
                const += kernel.moment_coef * fam.first_moment_above(x0)
            return total + const, size
    raise QuadratureError("far-tail panels did not converge", float(size))


def family_integral(fam, kernel, tol):
    """Integral of a kernel against a 1-D family over (0, inf); returns (value, err)."""
    scale = max(kernel.rate, kernel.freq, 1e-300)
    x0 = min(1.0 / scale, 1e6)
    near, e1 = _near_integral(fam, kernel, x0, tol / 2)
    far, e2 = _far_integral(fam, kernel, x0, tol / 2)
    return near + far, e1 + e2


def family_small_jump_bias(fam, zeta, eps, tol=1e-12):
    """Integral over (0, eps) of exp(zeta u) - 1 - zeta u; what compensated truncation drops."""
    k = _Kernel(
        near=lambda u: np.expm1(zeta * u) - zeta * u,
        far=None,
        lin=0.0,
        quad=0.5 * abs(zeta) ** 2,
        mass_coef=0.0,
        moment_coef=0.0,
        rate=0.0,
        freq=0.0,
    )
    # kernel is O(u^2) near 0; stop on the panel size instead of the remainder
    total = 0.0
    a = eps
    for _ in range(PANEL_BUDGET):
        lo = 0.25 * a
        u, w = panel_nodes(lo, a, GAUSS_NODES)
        val = np.dot(w, k.near(u) * fam.density(u))
        total += val
        a = lo
        if k.quad * fam.second_moment_below(a) < tol:
            break
    return total


# ---------------------------------------------------------------------------
# measures


class Atoms:
    """Finite sum of weighted point masses in R_+^n minus the origin."""

    kind = "atoms"

    def __init__(self, points, weights):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        weights = np.asarray(weights, dtype=float).ravel()
        if points.size == 0:
            points = points.reshape(0, points.shape[-1] if points.ndim == 2 else 1)
        if points.shape[0] != weights.shape[0]:
            raise StructuralError(f"{points.shape[0]} atoms but {weights.shape[0]} weights")
        if np.any(weights < 0) or not np.all(np.isfinite(weights)):
            raise StructuralError("atom weights must be finite and nonnegative")
        if np.any(points < 0) or not np.all(np.isfinite(points)):
            raise StructuralError("atoms must lie in the closed positive orthant")
        if points.shape[0] and np.any(np.all(points == 0, axis=1)):
            raise StructuralError("atom at the origin is not allowed")
        points.setflags(write=False)
        weights.setflags(write=False)
        self.points = points
        self.weights = weights

    @classmethod
    def empty(cls, dim):
        return cls(np.zeros((0, dim)), np.zeros(0))

    @property
    def dim(self):
        return self.points.shape[1]

    def __len__(self):
        return self.weights.shape[0]

    def scaled(self, a):
        return Atoms(self.points, self.weights * a)

    def damped(self, c):
        return Atoms(self.points, self.weights * np.exp(-self.points @ np.asarray(c, dtype=float)))

    def moments(self, delta):
        inside = np.all(self.points < delta, axis=1)
        near = self.weights[inside] @ self.points[inside]
        return np.asarray(near, dtype=float).reshape(self.dim), float(self.weights[~inside].sum())

    def total_first_moment(self):
        return self.weights @ self.points

    def psi_integral(self, z, tol):
        return np.sum(self.weights * np.expm1(self.points @ z)), 0.0

    def grad_integral(self, s, tol):
        return (self.weights * np.exp(self.points @ s)) @ self.points, 0.0

    def as_atoms(self):
        return self

    def to_json(self):
        return {"kind": "atoms", "points": self.points.tolist(), "weights": self.weights.tolist()}


class GridDensity:
    """Density tabulated on a rectangular (typically log-spaced) node set.

    ``qweights`` are per-node quadrature weights; the measure acts as atoms of
    mass density * qweight at the nodes.
    """

    kind = "grid"

    def __init__(self, axes, density, qweights):
        self.axes = tuple(np.asarray(a, dtype=float).ravel() for a in axes)
        shape = tuple(len(a) for a in self.axes)
        density = np.asarray(density, dtype=float).reshape(shape)
        qweights = np.asarray(qweights, dtype=float).reshape(shape)
        for a in self.axes:
            if np.any(a < 0) or np.any(np.diff(a) <= 0):
                raise StructuralError("grid axes must be nonnegative and strictly increasing")
        if np.any(density < 0) or np.any(qweights < 0):
            raise StructuralError("grid densities and weights must be nonnegative")
        origin = tuple(0 for _ in shape)
        if all(a[0] == 0 for a in self.axes) and density[origin] * qweights[origin] > 0:
            raise StructuralError("grid puts mass at the origin")
        density.setflags(write=False)
        qweights.setflags(write=False)
        self.density = density
        self.qweights = qweights

    @classmethod
    def from_function(cls, fn, lower, upper, nodes):
        """Log-spaced tensor grid with log-trapezoid weights; fn maps (N, n) points to densities."""
        lower = np.atleast_1d(np.asarray(lower, dtype=float))
        upper = np.atleast_1d(np.asarray(upper, dtype=float))
        axes, weights = [], []
        for lo, hi in zip(lower, upper):
            x = np.geomspace(lo, hi, nodes)
            lx = np.log(x)
            w = np.zeros(nodes)
            d = np.diff(lx)
            w[:-1] += 0.5 * d
            w[1:] += 0.5 * d
            axes.append(x)
            weights.append(w * x)  # du = u dlog u
        mesh = np.meshgrid(*axes, indexing="ij")
        pts = np.stack([m.ravel() for m in mesh], axis=1)
        qw = np.ones(mesh[0].shape)
        for j, w in enumerate(weights):
            shape = [1] * len(axes)
            shape[j] = -1
            qw = qw * w.reshape(shape)
        dens = np.asarray(fn(pts), dtype=float).reshape(mesh[0].shape)
        return cls(axes, dens, qw)

    @property
    def dim(self):
        return len(self.axes)

    def _flat(self):
        mesh = np.meshgrid(*self.axes, indexing="ij")
        pts = np.stack([m.ravel() for m in mesh], axis=1)
        return pts, (self.density * self.qweights).ravel()

    def as_atoms(self):
        pts, w = self._flat()
        keep = w > 0
        return Atoms(pts[keep], w[keep])

    def scaled(self, a):
        return GridDensity(self.axes, self.density * a, self.qweights)

    def damped(self, c):
        pts, _ = self._flat()
        factor = np.exp(-pts @ np.asarray(c, dtype=float)).reshape(self.density.shape)
        return GridDensity(self.axes, self.density * factor, self.qweights)

    def moments(self, delta):
        return self.as_atoms().moments(delta)

    def near_zero_growth(self, delta):
        """Per-axis log-slope of first-moment shell contributions near the origin.

        Shell k holds nodes whose largest axis index is k. For a density with
        finite first moments the shells shrink toward the origin, so the slope
        of log(shell) against log(node) is positive; a slope near zero means
        every shell contributes the same and the moment diverges as the grid
        is refined toward 0.
        """
        if any(a[0] >= delta for a in self.axes):
            return None
        idx = np.meshgrid(*[np.arange(len(a)) for a in self.axes], indexing="ij")
        shell = np.max(np.stack(idx), axis=0)
        pts, w = self._flat()
        w = w.reshape(self.density.shape)
        level = np.exp(np.mean([np.log(np.maximum(a, 1e-300)) for a in self._aligned_axes()], axis=0))
        # shell 0 is skipped (end-point quadrature weights are typically halved
        # there); in n >= 2 the first shells also miss most of their L-shaped
        # region, so fit on shells at least 10x beyond the first node if any
        ks = np.arange(1, min(6, len(level)))
        if self.dim > 1:
            clear = np.flatnonzero((level >= 10 * level[0]) & (level < delta))[:5]
            if len(clear) >= 2:
                ks = clear
        slopes = []
        for j in range(self.dim):
            comp = (pts[:, j].reshape(w.shape)) * w
            sums = np.array([comp[shell == k].sum() for k in ks])
            ok = sums > 0
            if ok.sum() < 2:
                continue
            slope = np.polyfit(np.log(level[ks][ok]), np.log(sums[ok]), 1)[0]
            slopes.append(float(slope))
        return slopes

    def _aligned_axes(self):
        k = min(len(a) for a in self.axes)
        return [a[:k] for a in self.axes]

    def total_first_moment(self):
        return self.as_atoms().total_first_moment()

    def psi_integral(self, z, tol):
        return self.as_atoms().psi_integral(z, tol)

    def grad_integral(self, s, tol):
        return self.as_atoms().grad_integral(s, tol)

    def to_json(self):
        return {
            "kind": "grid",
            "axes": [a.tolist() for a in self.axes],
            "density": self.density.tolist(),
            "weights": self.qweights.tolist(),
        }


class Parametric:
    """A 1-D family pushed onto the ray {v * direction : v > 0} in R_+^n."""

    kind = "parametric"

    def __init__(self, family, direction=(1.0,)):
        if not isinstance(family, Family):
            raise StructuralError("parametric measure needs a registered family")
        d = np.asarray(direction, dtype=float).ravel()
        if d.size == 0 or np.any(d < 0) or not np.any(d > 0):
            raise StructuralError("direction must be a nonzero vector in the positive orthant")
        d.setflags(write=False)
        self.family = family
        self.direction = d

    @property
    def dim(self):
        return self.direction.size

    def scaled(self, a):
        return Parametric(self.family.scaled(a), self.direction)

    def damped(self, c):
        return Parametric(self.family.damped(float(np.dot(c, self.direction))), self.direction)

    def moments(self, delta):
        cut = delta / self.direction.max()
        return self.direction * self.family.first_moment_below(cut), self.family.tail_mass(cut)

    def total_first_moment(self):
        return self.direction * self.family.total_first_moment()

    def psi_integral(self, z, tol):
        zeta = complex(np.dot(z, self.direction))
        val, err = family_integral(self.family, _psi_kernel(zeta), tol)
        return (val if np.iscomplexobj(z) else val.real), err

    def grad_integral(self, s, tol):
        zeta = complex(np.dot(s, self.direction))
        val, err = family_integral(self.family, _grad_kernel(zeta), tol)
        return self.direction * val.real, err

    def to_json(self):
        return {
            "kind": "parametric",
            "family": self.family.name,
            "params": self.family.params(),
            "direction": self.direction.tolist(),
        }


class SumMeasure:
    kind = "sum"

    def __init__(self, parts):
        parts = tuple(parts)
        if not parts:
            raise StructuralError("empty measure sum")
        dims = {p.dim for p in parts}
        if len(dims) != 1:
            raise StructuralError(f"measure parts of different dimensions {sorted(dims)}")
        self.parts = parts

    @property
    def dim(self):
        return self.parts[0].dim

    def scaled(self, a):
        return SumMeasure(p.scaled(a) for p in self.parts)

    def damped(self, c):
        return SumMeasure(p.damped(c) for p in self.parts)

    def moments(self, delta):
        near = np.zeros(self.dim)
        tail = 0.0
        for p in self.parts:
            m, t = p.moments(delta)
            near = near + m
            tail += t
        return near, tail

    def total_first_moment(self):
        return sum(p.total_first_moment() for p in self.parts)

    def psi_integral(self, z, tol):
        tol = tol / len(self.parts)
        vals = [p.psi_integral(z, tol) for p in self.parts]
        return sum(v for v, _ in vals), sum(e for _, e in vals)

    def grad_integral(self, s, tol):
        tol = tol / len(self.parts)
        vals = [p.grad_integral(s, tol) for p in self.parts]
        return sum(v for v, _ in vals), sum(e for _, e in vals)

    def to_json(self):
        return {"kind": "sum", "parts": [p.to_json() for p in self.parts]}


def measure_from_json(obj, dim=None):
    kind = obj.get("kind")
    if kind == "atoms":
        if dim is not None and len(obj["points"]) == 0:
            return Atoms.empty(dim)  # an empty list carries no dimension
        return Atoms(obj["points"], obj["weights"])
    if kind == "grid":
        return GridDensity(obj["axes"], obj["density"], obj["weights"])
    if kind == "parametric":
        return Parametric(family_from_json(obj["family"], obj.get("params", {})), obj.get("direction", [1.0]))
    if kind == "sum":
        return SumMeasure(measure_from_json(p, dim) for p in obj["parts"])
    raise StructuralError(f"unknown measure kind {kind!r}")


# ---------------------------------------------------------------------------
# triples


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    delta: float
    near_moments: tuple
    tail_mass: float
    failures: tuple = ()

    def to_json(self):
        return {
            "ok": self.ok,
            "delta": self.delta,
            "near_moments": list(self.near_moments),
            "tail_mass": self.tail_mass,
            "failures": list(self.failures),
        }


def _check_structure(t):
    if t.dim < 1:
        raise StructuralError("dimension must be a positive integer")
    if t.measure.dim != t.dim:
        raise StructuralError(f"measure dimension {t.measure.dim} differs from triple dimension {t.dim}")
    if len(t.c1) != t.dim:
        raise StructuralError(f"c1 has {len(t.c1)} components, expected {t.dim}")


def validate_triple(t, delta=None):
    """Check c0 <= 0, c1 >= 0 and the moment conditions at cutoff `delta`."""
    delta = t.delta if delta is None else float(delta)
    if not delta > 0:
        raise ValueError("delta must be positive")
    _check_structure(t)
    failures = []
    if not t.c0 <= 0:
        failures.append(f"c0 = {t.c0} is positive")
    if np.any(np.asarray(t.c1) < 0):
        failures.append(f"c1 = {list(t.c1)} has a negative component")
    near, tail = t.measure.moments(delta)
    if not np.all(np.isfinite(near)):
        failures.append("near-zero first moment is infinite")
    if not math.isfinite(tail):
        failures.append("mass away from the origin is infinite")
    for part in _leaves(t.measure):
        if isinstance(part, GridDensity):
            slopes = part.near_zero_growth(delta)
            # exact in 1-D; tensor grids in n >= 2 bias the slope upward near their corner
            limit = 0.05 if part.dim == 1 else 0.2
            if slopes and min(slopes) < limit:
                failures.append(
                    "grid first moment does not shrink toward the origin "
                    f"(shell log-slope {min(slopes):.3g}); it diverges under refinement"
                )
    return ValidationReport(not failures, delta, tuple(float(x) for x in near), float(tail), tuple(failures))


def _leaves(m):
    if isinstance(m, SumMeasure):
        for p in m.parts:
            yield from _leaves(p)
    else:
        yield m


@dataclass(frozen=True, eq=False)
class LevyTriple:
    """(c0, c1, mu) with psi(s) = c0 + c1.s + integral (exp(s.u) - 1) dmu(u)."""

    dim: int
    c0: float = 0.0
    c1: tuple = None
    measure: object = None
    delta: float = 1.0
    report: ValidationReport = field(init=False, repr=False)

    def __post_init__(self):
        if not isinstance(self.dim, (int, np.integer)) or self.dim < 1:
            raise StructuralError(f"dimension must be a positive integer, got {self.dim!r}")
        c1 = tuple(float(x) for x in np.atleast_1d(np.zeros(self.dim) if self.c1 is None else self.c1))
        object.__setattr__(self, "c1", c1)
        object.__setattr__(self, "c0", float(self.c0))
        if self.measure is None:
            object.__setattr__(self, "measure", Atoms.empty(self.dim))
        object.__setattr__(self, "report", validate_triple(self))

    @property
    def tol(self):
        return default_tol(self.dim)

    def require_valid(self):
        if not self.report.ok:
            raise IntegrabilityError("; ".join(self.report.failures))

    def scaled(self, a):
        if a < 0:
            raise ValueError("cone scaling needs a >= 0")
        return LevyTriple(self.dim, a * self.c0, tuple(a * x for x in self.c1), self.measure.scaled(a), self.delta)

    def __call__(self, *s):
        return evaluate_real(self, s[0] if len(s) == 1 else s)

    def to_json(self):
        return {"dim": self.dim, "c0": self.c0, "c1": list(self.c1), "measure": self.measure.to_json()}


def triple_from_json(obj, delta=1.0):
    try:
        dim = int(obj["dim"])
        measure = measure_from_json(obj["measure"], dim) if obj.get("measure") else None
        return LevyTriple(dim, obj.get("c0", 0.0), obj.get("c1"), measure, delta)
    except KeyError as e:
        raise StructuralError(f"triple JSON is missing field {e}") from None


def combine_triples(terms):
    """Conic combination sum(a_i * t_i); measures are concatenated."""
    terms = list(terms)
    if not terms:
        raise ValueError("nothing to combine")
    dims = {t.dim for _, t in terms}
    if len(dims) != 1:
        raise ValueError(f"cannot combine triples of dimensions {sorted(dims)}")
    if any(a < 0 for a, _ in terms):
        raise ValueError("conic combination needs nonnegative coefficients")
    (dim,) = dims
    c0 = sum(a * t.c0 for a, t in terms)
    c1 = np.sum([a * np.asarray(t.c1) for a, t in terms], axis=0)
    parts = [t.measure.scaled(a) for a, t in terms if a > 0]
    measure = SumMeasure(parts) if len(parts) > 1 else (parts[0] if parts else Atoms.empty(dim))
    return LevyTriple(dim, c0, tuple(c1), measure, min(t.delta for _, t in terms))


# ---------------------------------------------------------------------------
# evaluation


@dataclass(frozen=True)
class DomainPoint:
    """A point of {Re z < 0}; y is None for real evaluation."""

    s: tuple
    y: tuple = None

    def __post_init__(self):
        s = tuple(float(x) for x in np.atleast_1d(self.s))
        if not all(x < 0 for x in s):
            raise ValueError(f"domain points need strictly negative real parts, got {s}")
        object.__setattr__(self, "s", s)
        if self.y is not None:
            y = tuple(float(x) for x in np.atleast_1d(self.y))
            if len(y) != len(s):
                raise ValueError("real and imaginary parts differ in length")
            object.__setattr__(self, "y", y)

    @property
    def z(self):
        s = np.array(self.s)
        return s if self.y is None else s + 1j * np.array(self.y)


def _as_point(t, s, allow_complex):
    if isinstance(s, DomainPoint):
        z = s.z
    else:
        z = np.atleast_1d(np.asarray(s))
        if not allow_complex:
            z = z.astype(float)
        if not np.all(np.real(z) < 0):
            raise ValueError(f"evaluation needs Re z < 0 componentwise, got {z}")
    if z.shape != (t.dim,):
        raise ValueError(f"point has shape {z.shape}, triple has dimension {t.dim}")
    return z


def _integral(t, z, tol):
    val, err = t.measure.psi_integral(z, tol)
    if err > tol:
        raise QuadratureError(f"quadrature error {err:.3g} exceeds tolerance {tol:.3g}", err)
    return val


def evaluate_real(t, s, tol=None):
    """psi(s) for real s < 0."""
    t.require_valid()
    s = _as_point(t, s, allow_complex=False)
    if np.iscomplexobj(s):
        raise ValueError("evaluate_real takes a real point; use evaluate_complex")
    tol = t.tol if tol is None else tol
    return float(t.c0 + np.dot(t.c1, s) + _integral(t, s, tol))


def evaluate_complex(t, z, tol=None):
    """psi(z) on {Re z < 0}; a real z goes through the real path."""
    t.require_valid()
    z = _as_point(t, z, allow_complex=True)
    if not np.any(np.imag(z)):
        return complex(evaluate_real(t, np.real(z), tol))
    tol = t.tol if tol is None else tol
    z = z.astype(complex)
    return complex(t.c0 + np.dot(t.c1, z) + _integral(t, z, tol))


def gradient(t, s, tol=None):
    """c1 + integral of u exp(s.u) mu(du)."""
    t.require_valid()
    s = _as_point(t, s, allow_complex=False)
    tol = t.tol if tol is None else tol
    val, err = t.measure.grad_integral(s, tol)
    if err > tol:
        raise QuadratureError(f"quadrature error {err:.3g} exceeds tolerance {tol:.3g}", err)
    return np.asarray(t.c1) + np.asarray(val, dtype=float)


def shift_normalize(t, c, tol=None):
    """Triple of s -> psi(s - c) - psi(-c): measure damped by exp(-c.u), c0 = 0."""
    t.require_valid()
    c = np.atleast_1d(np.asarray(c, dtype=float))
    if c.shape != (t.dim,) or not np.all(c > 0):
        raise ValueError(f"shift must be a strictly positive {t.dim}-vector, got {c}")
    out = LevyTriple(t.dim, 0.0, t.c1, t.measure.damped(c), t.delta)
    tol = t.tol if tol is None else tol
    base = evaluate_real(t, -c, tol)
    for scale in (0.5, 1.0, 2.0):
        s = -scale * np.ones(t.dim)
        want = evaluate_real(t, s - c, tol) - base
        got = evaluate_real(out, s, tol)
        if abs(got - want) > 10 * tol * max(1.0, abs(want)):
            raise ArithmeticError(f"shifted triple disagrees at s={s}: {got} vs {want}")
    return out
