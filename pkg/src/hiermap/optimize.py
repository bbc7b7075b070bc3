"""Box-constrained minimization of hyperparameter objectives.

Two deliberately simple strategies, both deterministic:

* ``golden_section`` (1-D): evaluate an inclusive coarse grid, bracket the
  best point with its neighbours, then golden-section search inside the
  bracket.  Evaluating the grid endpoints means a monotone objective reports
  its minimizer exactly on the domain boundary, which the consistency
  experiments rely on to detect degenerate estimates.
* ``grid_then_polish`` (any dimension): inclusive grid followed by a
  bounded Nelder-Mead polish started at the best grid point.  The reported
  minimizer is the best point ever evaluated, so the polish can only improve
  on the grid.

Separate from :func:`minimize`, :func:`grid_scan` fills a cell-centered
table of objective values (used for landscape plots; the half-cell inset
keeps evaluations strictly inside an open box) and :func:`argmin_sets`
extracts its per-row/per-column minimizer curves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
import scipy.optimize

from .errors import DomainError, EvaluationError
from .objectives import ObjectiveSpec, evaluate
from .priors import HyperDomain

METHODS = ("auto", "golden_section", "grid_then_polish")

# bracket shrink factor of golden-section search
_RHO = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class OptimizerConfig:
    method: str = "auto"
    grid_points_per_dim: int = 32
    tol_theta: float = 1e-6
    max_evals: Optional[int] = None

    def __post_init__(self):
        if self.method not in METHODS:
            raise DomainError(f"unknown method {self.method!r}")
        if self.grid_points_per_dim < 2:
            raise DomainError("need at least two grid points per dimension")
        if not self.tol_theta > 0:
            raise DomainError("tol_theta must be positive")
        if self.max_evals is not None and self.max_evals < 1:
            raise DomainError("max_evals must be at least 1")


class ArgminReport(NamedTuple):
    theta_hat: tuple
    value: float
    evals: int
    boundary_hit: tuple  # per coordinate
    boundary_side: tuple  # -1 lower, +1 upper, 0 interior


class _BudgetExhausted(Exception):
    pass


class _Tracker:
    """Wraps the objective: counts evaluations, records the best point,
    raises on non-finite values and enforces the evaluation budget."""

    def __init__(self, fn, max_evals):
        self.fn = fn
        self.max_evals = max_evals
        self.evals = 0
        self.best_x = None
        self.best_f = math.inf

    def __call__(self, x):
        if self.max_evals is not None and self.evals >= self.max_evals:
            raise _BudgetExhausted
        self.evals += 1
        x = np.asarray(x, dtype=float)
        f = float(self.fn(x))
        if not math.isfinite(f):
            err = EvaluationError(f"objective returned {f} at theta={tuple(x)}")
            err.theta = tuple(x)
            raise err
        if f < self.best_f:
            self.best_f = f
            self.best_x = x.copy()
        return f


def _resolve(obj, domain):
    if isinstance(obj, ObjectiveSpec):
        fn = lambda x: evaluate(obj, x)
        domain = domain if domain is not None else obj.prior.domain
    elif callable(obj):
        fn = obj
        if domain is None:
            raise DomainError("a plain callable needs an explicit domain")
    else:
        raise DomainError("obj must be an ObjectiveSpec or a callable")
    if not isinstance(domain, HyperDomain):
        domain = HyperDomain(*domain)
    return fn, domain


def _golden(tracker, a, b, fa, fb, tol):
    # pinned iteration count: shrink the bracket below tol
    width = b - a
    if width <= tol:
        return
    iters = math.ceil(math.log(width / tol) / math.log(1.0 / _RHO))
    x1 = b - _RHO * (b - a)
    x2 = a + _RHO * (b - a)
    f1 = tracker(np.array([x1]))
    f2 = tracker(np.array([x2]))
    for _ in range(iters):
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _RHO * (b - a)
            f1 = tracker(np.array([x1]))
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _RHO * (b - a)
            f2 = tracker(np.array([x2]))


def minimize(obj, config: OptimizerConfig = None, domain=None) -> ArgminReport:
    """Minimize ``obj`` over its hyperparameter box.

    ``obj`` is an :class:`~hiermap.objectives.ObjectiveSpec` (domain taken
    from its prior unless overridden) or a callable receiving a 1-D float
    array.  Returns the best point ever evaluated; if ``max_evals`` runs out
    the search stops early and reports that point.  Non-finite objective
    values raise :class:`EvaluationError` with the offending ``theta``
    attached.
    """
    config = config or OptimizerConfig()
    fn, dom = _resolve(obj, domain)
    lo, hi = dom.arrays()
    dim = dom.dim
    method = config.method
    if method == "auto":
        method = "golden_section" if dim == 1 else "grid_then_polish"
    if method == "golden_section" and dim != 1:
        raise DomainError("golden_section only applies to 1-D domains")

    tracker = _Tracker(fn, config.max_evals)
    m = config.grid_points_per_dim
    axes = [np.linspace(lo[k], hi[k], m) for k in range(dim)]

    try:
        grid_vals = np.empty([m] * dim)
        for idx in np.ndindex(*grid_vals.shape):
            x = np.array([axes[k][idx[k]] for k in range(dim)])
            grid_vals[idx] = tracker(x)

        if method == "golden_section":
            xs = axes[0]
            i = int(np.argmin(grid_vals))
            a, b = xs[max(i - 1, 0)], xs[min(i + 1, m - 1)]
            _golden(tracker, a, b, grid_vals[max(i - 1, 0)],
                    grid_vals[min(i + 1, m - 1)], config.tol_theta)
        else:
            idx0 = np.unravel_index(int(np.argmin(grid_vals)), grid_vals.shape)
            x0 = np.array([axes[k][idx0[k]] for k in range(dim)])
            budget = None
            if config.max_evals is not None:
                budget = max(1, config.max_evals - tracker.evals)
            options = {"xatol": config.tol_theta, "fatol": 1e-10}
            if budget is not None:
                options["maxfev"] = budget
            scipy.optimize.minimize(
                tracker, x0, method="Nelder-Mead",
                bounds=list(zip(lo, hi)), options=options)
    except _BudgetExhausted:
        pass

    x = np.clip(tracker.best_x, lo, hi)
    width = hi - lo
    btol = 10.0 * config.tol_theta * np.maximum(1.0, width)
    side = np.where(np.abs(x - lo) <= btol, -1,
                    np.where(np.abs(x - hi) <= btol, 1, 0))
    return ArgminReport(
        theta_hat=tuple(float(v) for v in x),
        value=float(tracker.best_f),
        evals=tracker.evals,
        boundary_hit=tuple(bool(s != 0) for s in side),
        boundary_side=tuple(int(s) for s in side),
    )


@dataclass(frozen=True)
class GridTable:
    axes: tuple  # cell-center coordinates per dimension
    values: np.ndarray

    @property
    def shape(self):
        return self.values.shape


def grid_scan(obj, box, points_per_dim: int) -> GridTable:
    """Tabulate the objective on a cell-centered grid over ``box``.

    ``box`` is a ``HyperDomain`` or a ``(lower, upper)`` pair.  Cell centers
    sit half a cell inside the box ends, so scans over boxes that touch
    degenerate edges (zero variance, zero length scale) stay well defined.
    """
    if points_per_dim < 1:
        raise DomainError("need at least one cell per dimension")
    if isinstance(obj, ObjectiveSpec):
        fn = lambda x: evaluate(obj, x)
    elif callable(obj):
        fn = obj
    else:
        raise DomainError("obj must be an ObjectiveSpec or a callable")
    if isinstance(box, HyperDomain):
        lo, hi = box.arrays()
    else:
        lo = np.asarray(box[0], dtype=float)
        hi = np.asarray(box[1], dtype=float)
    dim = len(lo)
    step = (hi - lo) / points_per_dim
    axes = tuple(lo[k] + (np.arange(points_per_dim) + 0.5) * step[k]
                 for k in range(dim))
    values = np.empty([points_per_dim] * dim)
    for idx in np.ndindex(*values.shape):
        values[idx] = float(fn(np.array([axes[k][idx[k]] for k in range(dim)])))
    return GridTable(axes=axes, values=values)


class ArgminSets(NamedTuple):
    row_argmin: np.ndarray  # argmin along axis 1 for each axis-0 index
    col_argmin: np.ndarray  # argmin along axis 0 for each axis-1 index
    global_index: tuple


def argmin_sets(table: GridTable) -> ArgminSets:
    """Per-row and per-column minimizer curves of a 2-D table.

    Ties resolve to the smallest index, so the output is deterministic.
    """
    if table.values.ndim != 2:
        raise DomainError("argmin curves are defined for 2-D tables")
    return ArgminSets(
        row_argmin=np.argmin(table.values, axis=1),
        col_argmin=np.argmin(table.values, axis=0),
        global_index=tuple(int(v) for v in
                           np.unravel_index(int(np.argmin(table.values)),
                                            table.values.shape)),
    )
