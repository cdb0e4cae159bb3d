"""Thin, deterministic linear-programming layer.

All estimators in this package reduce to linear programs (pinball losses and
absolute-value penalties are piecewise linear), so they go through a single
entry point, :func:`solve_lp`, with an explicit problem container and a small
status vocabulary.  The heavy lifting is delegated to the HiGHS solvers behind
``scipy.optimize.linprog``; identical problems yield bit-identical solutions,
which the rest of the package relies on for reproducible output files.
"""

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy import sparse
from scipy.optimize import linprog


class LpConstructionError(ValueError):
    """Raised when a problem container is dimensionally or numerically invalid."""


class LpSolverError(RuntimeError):
    """Raised when the backend fails for reasons outside the status vocabulary."""


class LpStatus(Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"
    ITERATION_LIMIT = "IterationLimit"


_SCIPY_STATUS = {
    0: LpStatus.OPTIMAL,
    1: LpStatus.ITERATION_LIMIT,
    2: LpStatus.INFEASIBLE,
    3: LpStatus.UNBOUNDED,
}


@dataclass
class LpProblem:
    """Minimize ``c @ x`` subject to ``a_eq x = b_eq``, ``a_ineq x <= b_ineq``.

    ``bounds`` holds one ``(lower, upper)`` pair per variable with ``None``
    for an unbounded side; when omitted every variable defaults to
    ``(0, None)``.  Constraint matrices may be dense arrays or scipy sparse
    matrices.
    """

    c: np.ndarray
    a_eq: object = None
    b_eq: np.ndarray = None
    a_ineq: object = None
    b_ineq: np.ndarray = None
    bounds: list = None

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float)
        if self.c.ndim != 1:
            raise LpConstructionError("objective vector must be one-dimensional")
        n = self.c.size
        if not np.all(np.isfinite(self.c)):
            raise LpConstructionError("objective vector contains NaN or Inf")
        for name in ("eq", "ineq"):
            a = getattr(self, f"a_{name}")
            b = getattr(self, f"b_{name}")
            if (a is None) != (b is None):
                raise LpConstructionError(f"a_{name} and b_{name} must be given together")
            if a is None:
                continue
            b = np.asarray(b, dtype=float)
            setattr(self, f"b_{name}", b)
            if sparse.issparse(a):
                data = a.data
                shape = a.shape
            else:
                a = np.asarray(a, dtype=float)
                setattr(self, f"a_{name}", a)
                data = a
                shape = a.shape
            if len(shape) != 2 or shape[1] != n:
                raise LpConstructionError(
                    f"a_{name} has shape {shape}, expected (*, {n})")
            if shape[0] != b.size:
                raise LpConstructionError(
                    f"a_{name} has {shape[0]} rows but b_{name} has {b.size}")
            if not (np.all(np.isfinite(data)) and np.all(np.isfinite(b))):
                raise LpConstructionError(f"a_{name}/b_{name} contain NaN or Inf")
        if self.bounds is None:
            self.bounds = [(0.0, None)] * n
        elif len(self.bounds) != n:
            raise LpConstructionError(
                f"{len(self.bounds)} bound pairs for {n} variables")

    @property
    def n_variables(self):
        return self.c.size


@dataclass
class LpSolution:
    """Solver outcome; ``x`` is ``None`` unless the status is ``OPTIMAL``."""

    x: np.ndarray
    objective_value: float
    status: LpStatus
    n_iterations: int = 0

    @property
    def optimal(self):
        return self.status is LpStatus.OPTIMAL


def solve_lp(problem, tol_feas=1e-8, max_iter=None):
    """Solve an :class:`LpProblem`, returning an :class:`LpSolution`.

    ``tol_feas`` is passed to the backend as both primal and dual feasibility
    tolerance.  Hitting ``max_iter`` yields the ``ITERATION_LIMIT`` status
    rather than an exception; genuinely pathological numerical failures raise
    :class:`LpSolverError`.
    """
    options = {
        "primal_feasibility_tolerance": tol_feas,
        "dual_feasibility_tolerance": tol_feas,
    }
    if max_iter is not None:
        options["maxiter"] = int(max_iter)
    res = linprog(
        problem.c,
        A_ub=problem.a_ineq,
        b_ub=problem.b_ineq,
        A_eq=problem.a_eq,
        b_eq=problem.b_eq,
        bounds=problem.bounds,
        method="highs",
        options=options,
    )
    status = _SCIPY_STATUS.get(res.status)
    if status is None:
        raise LpSolverError(f"LP solver failed: {res.message}")
    if status is LpStatus.OPTIMAL:
        x = np.asarray(res.x, dtype=float)
        obj = float(res.fun)
    else:
        x = None
        obj = float("nan")
    return LpSolution(x=x, objective_value=obj, status=status,
                      n_iterations=int(getattr(res, "nit", 0) or 0))
