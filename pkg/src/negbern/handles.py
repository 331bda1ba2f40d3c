"""Black-box evaluable functions on the negative orthant."""

import numpy as np

from .representation import evaluate_complex, evaluate_real


class FunctionHandle:
    """A function of ``arity`` variables on (-inf, 0)^n, optionally on {Re z < 0}.

    Evaluators are vectorized: they take an (m, n) array and return (m,).
    ``noise`` is the absolute evaluation noise the membership tests must
    allow for, and ``rel_noise`` an extra error of rel_noise * eps * |f| on
    top of the rounding of the result itself; ``lower
    is the left edge of the declared test box [lower, 0)^n.
    """

    def __init__(self, arity, real, complex_=None, provenance=None, lower=-8.0, noise=0.0, triple=None, rel_noise=0.0):
        if arity < 1:
            raise ValueError("arity must be positive")
        if not (np.isfinite(lower) and lower < 0):
            raise ValueError("declared test box needs a finite negative lower bound")
        self.arity = int(arity)
        self._real = real
        self._complex = complex_
        self.provenance = provenance if provenance is not None else {"user": "callable"}
        self.lower = float(lower)
        self.noise = float(noise)
        self.rel_noise = float(rel_noise)
        self.triple = triple

    @classmethod
    def from_scalar(cls, arity, fn, complex_fn=None, **kw):
        """Wrap a function of one point (n floats) into a vectorized handle."""

        def real(x):
            return np.array([fn(*row) for row in x], dtype=float)

        cplx = None
        if complex_fn is not None:

            def cplx(z):
                return np.array([complex_fn(*row) for row in z], dtype=complex)

        return cls(arity, real, cplx, **kw)

    @classmethod
    def from_triple(cls, t, name=None, tol=None):
        def real(x):
            return np.array([evaluate_real(t, row, tol) for row in x])

        def cplx(z):
            return np.array([evaluate_complex(t, row, tol) for row in z])

        prov = {"triple": t.to_json()} if name is None else {"catalog": name}
        return cls(t.dim, real, cplx, prov, noise=t.tol if tol is None else tol, triple=t)

    @property
    def has_complex(self):
        return self._complex is not None

    def _points(self, x):
        x = np.asarray(x)
        if self.arity == 1 and x.ndim == 1:
            x = x[:, None]
        if x.ndim != 2 or x.shape[1] != self.arity:
            raise ValueError(f"expected points of shape (m, {self.arity}), got {x.shape}")
        return x

    def eval(self, x):
        """Real evaluation at an array of points."""
        x = self._points(np.asarray(x, dtype=float))
        return np.asarray(self._real(x), dtype=float).reshape(x.shape[0])

    def eval_complex(self, z):
        z = self._points(np.asarray(z, dtype=complex))
        if self._complex is None:
            raise TypeError(f"{self.describe()} has no complex evaluator")
        return np.asarray(self._complex(z), dtype=complex).reshape(z.shape[0])

    def __call__(self, *x):
        pt = np.asarray(x[0] if len(x) == 1 else x)
        if pt.size != self.arity:
            raise ValueError(f"expected {self.arity} coordinates, got {pt.size}")
        pt = pt.reshape(1, self.arity)
        if np.iscomplexobj(pt):
            return complex(self.eval_complex(pt)[0])
        return float(self.eval(pt)[0])

    def scaled(self, a):
        cplx = None if self._complex is None else (lambda z: a * self._complex(z))
        return FunctionHandle(
            self.arity,
            lambda x: a * self._real(x),
            cplx,
            {"op": "scale", "coef": a, "args": [self.provenance]},
            self.lower,
            abs(a) * self.noise,
            None if self.triple is None else self.triple.scaled(a),
            self.rel_noise,
        )

    def describe(self):
        p = self.provenance
        if "catalog" in p:
            return f"catalog:{p['catalog']}"
        if "expr" in p:
            return f"expr:{p['expr']}"
        if "op" in p:
            return f"op:{p['op']}"
        return "function"

    def __repr__(self):
        return f"FunctionHandle(arity={self.arity}, {self.describe()})"
