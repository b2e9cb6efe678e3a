"""Connection kernels ``f`` for hidden-variable random graphs.

A pair of vertices with weights ``h_i, h_j`` is connected with probability
``f(h_i * h_j / h_s**2)``.  Every kernel is defined on ``[0, 1]`` and can be
written as ``f(u) = u * r(u)`` with ``r(0) = 1``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import KernelDomainError

DOMAIN_TOL = 1e-12


class KernelKind(enum.Enum):
    CHUNG_LU = "chung-lu"
    POISSON = "poisson"
    GENERALIZED = "generalized"
    CUSTOM = "custom"


def _chung_lu(u):
    return np.minimum(u, 1.0)


def _poisson(u):
    return -np.expm1(-np.asarray(u, dtype=float))


def _generalized(u):
    u = np.asarray(u, dtype=float)
    return u / (1.0 + u)


@dataclass(frozen=True)
class Kernel:
    kind: KernelKind
    func: Callable = field(repr=False, compare=False)
    table: tuple | None = field(default=None, repr=False)

    @property
    def name(self) -> str:
        return self.kind.value

    def __call__(self, u):
        """Vectorized ``f`` without domain checks (callers clamp)."""
        out = self.func(u)
        return float(out) if np.ndim(out) == 0 else out

    @property
    def r1(self) -> float:
        return float(self.func(1.0))


CHUNG_LU = Kernel(KernelKind.CHUNG_LU, _chung_lu)
POISSON = Kernel(KernelKind.POISSON, _poisson)
GENERALIZED = Kernel(KernelKind.GENERALIZED, _generalized)

_BY_NAME = {k.name: k for k in (CHUNG_LU, POISSON, GENERALIZED)}
_BY_NAME.update({"chunglu": CHUNG_LU, "cl": CHUNG_LU, "generalized-rg": GENERALIZED})


def kernel_from_name(name: str) -> Kernel:
    try:
        return _BY_NAME[name.strip().lower()]
    except KeyError:
        raise ValueError(
            f"unknown kernel {name!r}; expected one of chung-lu, poisson, generalized"
        ) from None


def custom_kernel(xs, ys, r1: float | None = None) -> Kernel:
    """Kernel from a table of ``(u, f(u))`` points on ``[0, 1]``.

    Values between table points are linearly interpolated.  The table must
    start at ``u = 0`` and end at ``u = 1``.  If ``r1`` is given it must agree
    with the tabulated ``f(1)``.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.ndim != 1 or xs.shape != ys.shape or xs.size < 2:
        raise ValueError("xs and ys must be 1-d arrays of equal length >= 2")
    if np.any(np.diff(xs) <= 0):
        raise ValueError("xs must be strictly increasing")
    if abs(xs[0]) > DOMAIN_TOL or abs(xs[-1] - 1.0) > DOMAIN_TOL:
        raise ValueError("table must span exactly [0, 1]")
    if np.any(ys < 0) or np.any(ys > 1):
        raise ValueError("tabulated probabilities must lie in [0, 1]")
    if r1 is not None and abs(r1 - ys[-1]) > 1e-9:
        raise ValueError(f"declared r(1)={r1} disagrees with tabulated f(1)={ys[-1]}")
    xs.setflags(write=False)
    ys.setflags(write=False)

    def func(u):
        return np.interp(u, xs, ys)

    return Kernel(KernelKind.CUSTOM, func, table=(xs, ys))


def _check_domain(u: float) -> float:
    if not (-DOMAIN_TOL <= u <= 1.0 + DOMAIN_TOL):
        raise KernelDomainError(f"kernel argument {u!r} outside [0, 1]")
    return min(max(u, 0.0), 1.0)


def eval_f(kernel: Kernel, u: float) -> float:
    """Connection probability ``f(u)`` for ``u`` in ``[0, 1]``."""
    return float(kernel.func(_check_domain(u)))


def eval_r(kernel: Kernel, u: float) -> float:
    """Ratio ``r(u) = f(u) / u``, with ``r(0) = 1`` by definition."""
    u = _check_domain(u)
    if u == 0.0:
        return 1.0
    return float(kernel.func(u)) / u


@dataclass(frozen=True)
class Assumption1Report:
    nonnegative: bool
    nondecreasing: bool
    convex: bool
    worst_violation: float

    @property
    def holds(self) -> bool:
        return self.nonnegative and self.nondecreasing and self.convex


@dataclass(frozen=True)
class Assumption2Report:
    r0_is_one: bool
    r_nonincreasing: bool
    worst_violation: float
    r0_estimate: float

    @property
    def holds(self) -> bool:
        return self.r0_is_one and self.r_nonincreasing


def check_assumption1(kernel: Kernel, grid_size: int = 1001) -> Assumption1Report:
    """Grid check that ``f`` is non-negative, non-decreasing and convex on [0, 1].

    Differences are compared against ``-tol`` with ``tol = 1e-9`` times the
    largest ``|f|`` on the grid.  ``worst_violation`` is the most negative of
    ``f``, its forward differences and its second differences (0 if none is
    negative).
    """
    if grid_size < 3:
        raise ValueError("grid_size must be >= 3")
    u = np.linspace(0.0, 1.0, grid_size)
    f = np.asarray(kernel.func(u), dtype=float)
    tol = 1e-9 * max(float(np.max(np.abs(f))), np.finfo(float).tiny)
    d1 = np.diff(f)
    d2 = np.diff(f, n=2)
    worst = min(0.0, float(f.min()), float(d1.min()), float(d2.min()))
    return Assumption1Report(
        nonnegative=bool(f.min() >= -tol),
        nondecreasing=bool(d1.min() >= -tol),
        convex=bool(d2.min() >= -tol),
        worst_violation=worst,
    )


def _extrapolate_to_zero(x: np.ndarray, y: np.ndarray) -> float:
    # Lagrange polynomial through the given points, evaluated at 0.
    total = 0.0
    for i in range(len(x)):
        w = 1.0
        for j in range(len(x)):
            if j != i:
                w *= (0.0 - x[j]) / (x[i] - x[j])
        total += w * y[i]
    return total


def check_assumption2(kernel: Kernel, grid_size: int = 1001) -> Assumption2Report:
    """Grid check that ``r(0) = 1`` and that ``r`` is non-increasing.

    ``r(0)`` is estimated by quadratic extrapolation of ``f(u)/u`` from the
    three smallest positive grid points and must be within ``1e-6`` of 1.
    """
    if grid_size < 3:
        raise ValueError("grid_size must be >= 3")
    u = np.linspace(0.0, 1.0, grid_size)[1:]
    r = np.asarray(kernel.func(u), dtype=float) / u
    m = min(3, len(u))
    r0 = _extrapolate_to_zero(u[:m], r[:m])
    diffs = np.diff(np.concatenate(([1.0], r)))
    worst = min(0.0, float(-diffs.max()))
    return Assumption2Report(
        r0_is_one=bool(abs(r0 - 1.0) <= 1e-6),
        r_nonincreasing=bool(diffs.max() <= 1e-9),
        worst_violation=worst,
        r0_estimate=float(r0),
    )
