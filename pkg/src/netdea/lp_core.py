"""Dense two-phase primal simplex for small linear programs.

Solves maximization problems of the form

    max  c' x
    s.t. A x {<=, =, >=} b   (row-wise senses)
         x >= lb             (finite lower bounds)

The engine is self-contained: no external solver is involved. Bland's
pivoting rule is used throughout, which guarantees termination on the
degenerate programs that multiplier-form DEA produces. All storage is
dense; the programs built by this package stay in the tens of rows and
columns, so sparsity machinery would be pure overhead.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

LESS_EQUAL = "<="
EQUAL = "="
GREATER_EQUAL = ">="
_SENSES = (LESS_EQUAL, EQUAL, GREATER_EQUAL)
_FLIPPED = {LESS_EQUAL: GREATER_EQUAL, GREATER_EQUAL: LESS_EQUAL, EQUAL: EQUAL}

_SMALL_PIVOT_STRIKE_LIMIT = 3


class SolveStatus(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    NUMERICAL_FAILURE = "numerical_failure"


@dataclass(frozen=True)
class ToleranceSettings:
    """Numeric tolerances for the simplex engine.

    feasibility_tol bounds accepted constraint violation, pivot_tol is the
    smallest pivot element considered reliable, optimality_tol is the
    reduced-cost threshold for entering columns, and max_iterations caps the
    total pivot count across both phases.
    """

    feasibility_tol: float = 1e-9
    pivot_tol: float = 1e-10
    optimality_tol: float = 1e-9
    max_iterations: int = 50_000

    def __post_init__(self):
        if self.feasibility_tol <= 0 or self.pivot_tol <= 0 or self.optimality_tol <= 0:
            raise ValueError("tolerances must be strictly positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")


def _as_readonly(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class LinearProgram:
    """A maximization LP in row-sense inequality form.

    objective : (n,) coefficients of the maximized linear objective
    constraint_matrix : (m, n) dense constraint rows
    constraint_senses : per-row sense, each one of "<=", "=", ">="
    rhs : (m,) right-hand sides
    variable_lower_bounds : (n,) finite lower bounds (x >= lb)
    """

    objective: np.ndarray
    constraint_matrix: np.ndarray
    constraint_senses: tuple
    rhs: np.ndarray
    variable_lower_bounds: np.ndarray

    def __post_init__(self):
        obj = _as_readonly(self.objective)
        mat = _as_readonly(self.constraint_matrix)
        rhs = _as_readonly(self.rhs)
        lb = _as_readonly(self.variable_lower_bounds)
        senses = tuple(self.constraint_senses)
        if mat.ndim != 2:
            raise ValueError("constraint_matrix must be two-dimensional")
        m, n = mat.shape
        if obj.shape != (n,):
            raise ValueError(f"objective has length {obj.shape}, expected ({n},)")
        if lb.shape != (n,):
            raise ValueError(f"variable_lower_bounds has shape {lb.shape}, expected ({n},)")
        if rhs.shape != (m,):
            raise ValueError(f"rhs has shape {rhs.shape}, expected ({m},)")
        if len(senses) != m:
            raise ValueError(f"got {len(senses)} senses for {m} rows")
        for s in senses:
            if s not in _SENSES:
                raise ValueError(f"unknown constraint sense {s!r}")
        for name, arr in (("objective", obj), ("constraint_matrix", mat),
                          ("rhs", rhs), ("variable_lower_bounds", lb)):
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} contains non-finite entries")
        object.__setattr__(self, "objective", obj)
        object.__setattr__(self, "constraint_matrix", mat)
        object.__setattr__(self, "constraint_senses", senses)
        object.__setattr__(self, "rhs", rhs)
        object.__setattr__(self, "variable_lower_bounds", lb)

    @property
    def num_variables(self) -> int:
        return self.constraint_matrix.shape[1]

    @property
    def num_constraints(self) -> int:
        return self.constraint_matrix.shape[0]


@dataclass(frozen=True, eq=False)
class LpSolution:
    """Solved state of a LinearProgram.

    variable_values is empty and objective_value is NaN unless the status is
    OPTIMAL. iterations counts simplex pivots across both phases.
    """

    status: SolveStatus
    objective_value: float = float("nan")
    variable_values: np.ndarray = field(default_factory=lambda: _as_readonly([]))
    iterations: int = 0


def _install_objective(T: np.ndarray, basis: np.ndarray, coeffs: np.ndarray) -> None:
    # Objective row stores reduced costs for maximization; the value cell
    # holds the negated objective of the current basic solution.
    T[-1, :-1] = coeffs
    T[-1, -1] = 0.0
    for i, b in enumerate(basis):
        coef = T[-1, b]
        if coef != 0.0:
            T[-1, :] -= coef * T[i, :]


def _pivot(T: np.ndarray, basis: np.ndarray, row: int, col: int) -> None:
    T[row, :] /= T[row, col]
    factors = T[:, col].copy()
    factors[row] = 0.0
    T -= np.outer(factors, T[row, :])
    T[:, col] = 0.0
    T[row, col] = 1.0
    basis[row] = col


def _iterate(T: np.ndarray, basis: np.ndarray, tol: ToleranceSettings,
             budget: int, lockout_start: int | None = None):
    """Run simplex pivots until optimality, unboundedness, or exhaustion.

    Returns (outcome, iterations) with outcome one of "optimal", "unbounded",
    "iteration_cap", "small_pivots". Columns at or beyond lockout_start are
    barred from re-entering the basis once they leave it (used to retire
    phase-1 artificials for good).
    """
    iterations = 0
    strikes = 0
    nrows = T.shape[0] - 1
    barred = np.zeros(T.shape[1] - 1, dtype=bool)
    while True:
        reduced = T[-1, :-1]
        improving = np.nonzero((reduced > tol.optimality_tol) & ~barred)[0]
        if improving.size == 0:
            return "optimal", iterations
        if iterations >= budget:
            return "iteration_cap", iterations
        col = int(improving[0])  # Bland: lowest improving index
        column = T[:nrows, col]
        # Entries below pivot_tol relative to the column's own magnitude are
        # elimination residue, never real pivots; a column with none above
        # that certifies an unbounded ray.
        threshold = tol.pivot_tol * float(np.abs(column).max(initial=1.0))
        candidates = np.nonzero(column > threshold)[0]
        if candidates.size == 0:
            return "unbounded", iterations
        rhs = np.maximum(T[candidates, -1], 0.0)
        ratios = rhs / column[candidates]
        best = ratios.min()
        tied = candidates[ratios <= best + 1e-12 * max(1.0, abs(best))]
        row = int(tied[np.argmin(basis[tied])])  # Bland tie-break: lowest basic index
        if column[row] < 1e3 * threshold:
            # The forced pivot sits barely above tolerance; one such step is
            # survivable, a run of them means the tableau has degraded.
            strikes += 1
            if strikes >= _SMALL_PIVOT_STRIKE_LIMIT:
                return "small_pivots", iterations
        else:
            strikes = 0
        leaving = basis[row]
        if lockout_start is not None and leaving >= lockout_start:
            barred[leaving] = True
        _pivot(T, basis, row, col)
        iterations += 1


def _max_violation(lp: LinearProgram, x: np.ndarray) -> float:
    residual = lp.constraint_matrix @ x - lp.rhs
    worst = 0.0
    for i, sense in enumerate(lp.constraint_senses):
        if sense == LESS_EQUAL:
            v = residual[i]
        elif sense == GREATER_EQUAL:
            v = -residual[i]
        else:
            v = abs(residual[i])
        if v > worst:
            worst = float(v)
    bound_gap = float(np.max(lp.variable_lower_bounds - x, initial=0.0))
    return max(worst, bound_gap)


def solve_lp(lp: LinearProgram, tol: ToleranceSettings | None = None) -> LpSolution:
    """Solve a LinearProgram with the two-phase primal simplex.

    The solution is a pure function of the inputs: identical programs and
    tolerances produce bit-identical results. A NUMERICAL_FAILURE status
    means the engine could not certify any other outcome (iteration cap,
    persistent sub-tolerance pivots, or a final point that fails the
    feasibility check); callers must surface it rather than substitute a
    value.
    """
    if tol is None:
        tol = ToleranceSettings()

    n = lp.num_variables
    m = lp.num_constraints
    lb = lp.variable_lower_bounds

    # Shift to x = lb + t, t >= 0, then normalize senses so rhs >= 0.
    A = lp.constraint_matrix.copy()
    b = lp.rhs - lp.constraint_matrix @ lb
    senses = list(lp.constraint_senses)
    for i in range(m):
        if b[i] < 0:
            A[i, :] = -A[i, :]
            b[i] = -b[i]
            senses[i] = _FLIPPED[senses[i]]

    slack_rows = [i for i, s in enumerate(senses) if s == LESS_EQUAL]
    surplus_rows = [i for i, s in enumerate(senses) if s == GREATER_EQUAL]
    artificial_rows = [i for i, s in enumerate(senses) if s != LESS_EQUAL]
    n_slack = len(slack_rows) + len(surplus_rows)
    n_art = len(artificial_rows)
    total = n + n_slack + n_art

    T = np.zeros((m + 1, total + 1))
    T[:m, :n] = A
    T[:m, -1] = b
    basis = np.full(m, -1, dtype=int)
    col = n
    for i in slack_rows:
        T[i, col] = 1.0
        basis[i] = col
        col += 1
    for i in surplus_rows:
        T[i, col] = -1.0
        col += 1
    art_start = n + n_slack
    col = art_start
    for i in artificial_rows:
        T[i, col] = 1.0
        basis[i] = col
        col += 1

    iterations = 0
    if n_art:
        phase1 = np.zeros(total)
        phase1[art_start:] = -1.0
        _install_objective(T, basis, phase1)
        outcome, used = _iterate(T, basis, tol, tol.max_iterations,
                                 lockout_start=art_start)
        iterations += used
        if outcome != "optimal":
            # Phase 1 is bounded by construction, so anything else is numeric.
            return LpSolution(SolveStatus.NUMERICAL_FAILURE, iterations=iterations)
        if T[-1, -1] > tol.feasibility_tol:
            return LpSolution(SolveStatus.INFEASIBLE, iterations=iterations)

        keep = np.ones(m, dtype=bool)
        for i in range(m):
            if basis[i] >= art_start:
                row = T[i, :art_start]
                pivots = np.nonzero(np.abs(row) > tol.pivot_tol)[0]
                if pivots.size:
                    _pivot(T, basis, i, int(pivots[0]))
                else:
                    keep[i] = False  # redundant row
        if not keep.all():
            T = np.vstack([T[:m][keep], T[-1:]])
            basis = basis[keep]
            m = int(keep.sum())
        T = np.delete(T, np.s_[art_start:art_start + n_art], axis=1)

    phase2 = np.zeros(T.shape[1] - 1)
    phase2[:n] = lp.objective
    _install_objective(T, basis, phase2)
    outcome, used = _iterate(T, basis, tol, tol.max_iterations - iterations)
    iterations += used
    if outcome == "unbounded":
        return LpSolution(SolveStatus.UNBOUNDED, iterations=iterations)
    if outcome != "optimal":
        return LpSolution(SolveStatus.NUMERICAL_FAILURE, iterations=iterations)

    shifted = np.zeros(T.shape[1] - 1)
    shifted[basis] = T[:m, -1]
    x = lb + shifted[:n]
    if _max_violation(lp, x) > tol.feasibility_tol:
        return LpSolution(SolveStatus.NUMERICAL_FAILURE, iterations=iterations)
    return LpSolution(
        SolveStatus.OPTIMAL,
        objective_value=float(lp.objective @ x),
        variable_values=_as_readonly(x),
        iterations=iterations,
    )
