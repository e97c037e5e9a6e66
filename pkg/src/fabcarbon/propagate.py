"""Uncertainty propagation through arithmetic expressions.

An expression tree combines named stochastic inputs with constants through
add / multiply / divide / scale / exp-of-negated-product nodes.  Propagation
is Monte Carlo: each named input is sampled exactly once per trial from its
own counter-based substream, so two references to the same name share the
draw (the mechanism behind "same fab conditions" correlations), while
distinct names are independent and adding a new input never perturbs the
streams of existing ones.

:func:`propagate_grid` is the independent-case oracle: it combines two grid
densities by an outer sum/product/quotient with linear binning, with no
randomness involved, and is used to cross-check the Monte Carlo leg.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import (
    DivisionSupportIncludesZeroError,
    DivisorSupportNonPositiveError,
    OutGridTooNarrowError,
    UnboundInputError,
    ValidationError,
)
from .grid import GridDistribution, GridSpec
from .rng import aligned_chunks, substream_uniforms
from .sampling import SampleSet

DEFAULT_MC_SAMPLES = 1_000_000

_CHUNK = 1 << 18

Interval = tuple[float, float]


def source_support(source) -> Interval:
    """Support interval of an input source (grid, point mass, or frozen dist)."""
    if isinstance(source, (int, float)):
        return (float(source), float(source))
    sup = source.support()
    return (float(sup[0]), float(sup[1]))


def source_ppf(source, u: np.ndarray) -> np.ndarray:
    if isinstance(source, (int, float)):
        return np.full(u.shape, float(source))
    return np.asarray(source.ppf(u), dtype=np.float64)


def _corners(a: Interval, b: Interval, op) -> Interval:
    vals = [op(x, y) for x in a for y in b]
    return (min(vals), max(vals))


class Expr:
    """Base expression node; operators build larger trees."""

    def evaluate(self, inputs: Mapping[str, np.ndarray]) -> np.ndarray:
        raise NotImplementedError

    def referenced_names(self) -> frozenset[str]:
        raise NotImplementedError

    def support(self, bounds: Mapping[str, Interval]) -> Interval:
        raise NotImplementedError

    def __add__(self, other) -> "Expr":
        return Add(self, as_expr(other))

    def __radd__(self, other) -> "Expr":
        return Add(as_expr(other), self)

    def __sub__(self, other) -> "Expr":
        return Add(self, Scale(as_expr(other), -1.0))

    def __mul__(self, other) -> "Expr":
        return Mul(self, as_expr(other))

    def __rmul__(self, other) -> "Expr":
        return Mul(as_expr(other), self)

    def __truediv__(self, other) -> "Expr":
        return Div(self, as_expr(other))


def as_expr(value) -> Expr:
    if isinstance(value, Expr):
        return value
    if isinstance(value, (int, float)):
        return Const(float(value))
    raise ValidationError(f"cannot treat {value!r} as an expression")


@dataclass(frozen=True)
class Input(Expr):
    """Reference to a named stochastic input."""

    name: str

    def evaluate(self, inputs):
        return inputs[self.name]

    def referenced_names(self):
        return frozenset((self.name,))

    def support(self, bounds):
        return bounds[self.name]


@dataclass(frozen=True)
class Const(Expr):
    value: float

    def evaluate(self, inputs):
        return self.value

    def referenced_names(self):
        return frozenset()

    def support(self, bounds):
        return (self.value, self.value)


@dataclass(frozen=True)
class Add(Expr):
    lhs: Expr
    rhs: Expr

    def evaluate(self, inputs):
        return self.lhs.evaluate(inputs) + self.rhs.evaluate(inputs)

    def referenced_names(self):
        return self.lhs.referenced_names() | self.rhs.referenced_names()

    def support(self, bounds):
        (a, b), (c, d) = self.lhs.support(bounds), self.rhs.support(bounds)
        return (a + c, b + d)


@dataclass(frozen=True)
class Mul(Expr):
    lhs: Expr
    rhs: Expr

    def evaluate(self, inputs):
        return self.lhs.evaluate(inputs) * self.rhs.evaluate(inputs)

    def referenced_names(self):
        return self.lhs.referenced_names() | self.rhs.referenced_names()

    def support(self, bounds):
        return _corners(self.lhs.support(bounds), self.rhs.support(bounds), lambda x, y: x * y)


@dataclass(frozen=True)
class Div(Expr):
    num: Expr
    den: Expr

    def evaluate(self, inputs):
        return self.num.evaluate(inputs) / self.den.evaluate(inputs)

    def referenced_names(self):
        return self.num.referenced_names() | self.den.referenced_names()

    def support(self, bounds):
        lo, hi = self.den.support(bounds)
        if lo <= 0.0:
            # rejected while walking supports at validation, before any trial runs
            raise DivisionSupportIncludesZeroError(
                f"denominator support [{lo}, {hi}] must be strictly positive"
            )
        return _corners(self.num.support(bounds), (lo, hi), lambda x, y: x / y)


@dataclass(frozen=True)
class Scale(Expr):
    """Multiplication by a constant factor."""

    child: Expr
    factor: float

    def evaluate(self, inputs):
        return self.child.evaluate(inputs) * self.factor

    def referenced_names(self):
        return self.child.referenced_names()

    def support(self, bounds):
        lo, hi = self.child.support(bounds)
        lo, hi = lo * self.factor, hi * self.factor
        return (min(lo, hi), max(lo, hi))


@dataclass(frozen=True)
class ExpNegMul(Expr):
    """``exp(-a * b)`` — the Poisson yield kernel for a defect density and an area."""

    lhs: Expr
    rhs: Expr

    def evaluate(self, inputs):
        return np.exp(-(self.lhs.evaluate(inputs) * self.rhs.evaluate(inputs)))

    def referenced_names(self):
        return self.lhs.referenced_names() | self.rhs.referenced_names()

    def support(self, bounds):
        lo, hi = _corners(self.lhs.support(bounds), self.rhs.support(bounds), lambda x, y: x * y)
        return (float(np.exp(-hi)), float(np.exp(-lo)))


@dataclass(frozen=True)
class PropagationExpr:
    """An expression tree plus the sources bound to its input names.

    Sources may be :class:`GridDistribution`, :class:`PointMass`, plain
    numbers, or any object exposing ``ppf(u)`` and ``support()`` (for example
    a frozen scipy distribution).
    """

    root: Expr
    inputs: Mapping[str, object]

    def validate(self) -> None:
        referenced = self.root.referenced_names()
        missing = sorted(referenced - set(self.inputs))
        if missing:
            raise UnboundInputError(f"expression references unbound inputs: {', '.join(missing)}")
        # walking the support also rejects divide nodes whose denominator can
        # reach zero, before any trial is evaluated
        self.root.support(self._input_bounds())

    def _input_bounds(self) -> dict[str, Interval]:
        return {name: source_support(src) for name, src in self.inputs.items()}


def propagate_mc(
    expr: PropagationExpr,
    n: int = DEFAULT_MC_SAMPLES,
    seed: int = 0,
    workers: int = 1,
    label: str = "",
) -> SampleSet:
    """Evaluate ``expr`` over ``n`` joint Monte Carlo trials.

    Trial ``i`` of input ``name`` is always inverse-CDF-transformed from
    uniform draw ``i`` of the ``(seed, name)`` substream, so results are
    bit-identical for any ``workers`` setting and any chunking.
    """
    if n < 1:
        raise ValidationError(f"trial count must be >= 1, got {n}")
    expr.validate()
    names = sorted(expr.root.referenced_names())
    out = np.empty(n, dtype=np.float64)

    def run_chunk(start: int, count: int) -> None:
        drawn = {
            name: source_ppf(expr.inputs[name], substream_uniforms(seed, name, count, start))
            for name in names
        }
        result = expr.root.evaluate(drawn)
        out[start : start + count] = result  # broadcasts constant-only trees

    chunks = aligned_chunks(n, _CHUNK)
    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(lambda c: run_chunk(*c), chunks))
    else:
        for start, count in chunks:
            run_chunk(start, count)
    return SampleSet(values=out, seed=seed, label=label)


_GRID_OPS = {
    "add": np.add,
    "multiply": np.multiply,
    "divide": np.divide,
}


def propagate_grid(
    op: str,
    a: GridDistribution,
    b: GridDistribution,
    out_grid: GridSpec | tuple[float, float, int],
) -> GridDistribution:
    """Combine two independent grid densities by an outer operation.

    Every pair of grid nodes deposits mass ``a_i * b_j * dx_a * dx_b`` at
    ``op(x_i, y_j)``, split linearly between the two nearest output nodes,
    and the result is renormalized.  Serves as the independent-case oracle
    for :func:`propagate_mc`.
    """
    if op not in _GRID_OPS:
        raise ValidationError(f"op must be one of {sorted(_GRID_OPS)}, got {op!r}")
    if op == "divide":
        lo, _ = b.support()
        if lo <= 0.0:
            raise DivisorSupportNonPositiveError(f"divisor support starts at {lo}; must be > 0")
    out_grid = GridSpec(*out_grid)
    ufunc = _GRID_OPS[op]

    lo_need, hi_need = _corners(a.support(), b.support(), lambda x, y: float(ufunc(x, y)))
    tol = 1e-9 * max(abs(lo_need), abs(hi_need), 1.0)
    if out_grid.x_min > lo_need + tol or out_grid.x_max < hi_need - tol:
        raise OutGridTooNarrowError(
            f"out grid [{out_grid.x_min}, {out_grid.x_max}] must cover [{lo_need}, {hi_need}]"
        )

    n = out_grid.n_points
    out_dx = (out_grid.x_max - out_grid.x_min) / (n - 1)
    mass = np.zeros(n)
    wb = b.density * b.dx
    xb = b.x
    for start in range(0, a.n_points, 256):
        xa = a.x[start : start + 256, None]
        wa = (a.density[start : start + 256] * a.dx)[:, None]
        vals = ufunc(xa, xb[None, :]).ravel()
        w = (wa * wb[None, :]).ravel()
        pos = np.clip((vals - out_grid.x_min) / out_dx, 0.0, n - 1.0)
        idx = np.minimum(pos.astype(np.int64), n - 2)
        frac = pos - idx
        mass += np.bincount(idx, weights=w * (1.0 - frac), minlength=n)
        mass += np.bincount(idx + 1, weights=w * frac, minlength=n)
    return GridDistribution.from_unnormalized(out_grid.x_min, out_grid.x_max, mass / out_dx)


def auto_out_grid(
    op: str,
    a: GridDistribution,
    b: GridDistribution,
    n_points: int | None = None,
) -> GridSpec:
    """Smallest output grid covering the combined support of ``op(a, b)``."""
    ufunc = _GRID_OPS[op]
    lo, hi = _corners(a.support(), b.support(), lambda x, y: float(ufunc(x, y)))
    if hi <= lo:
        pad = 1e-9 * max(abs(lo), 1.0)
        lo, hi = lo - pad, hi + pad
    return GridSpec(lo, hi, n_points or max(a.n_points, b.n_points))
