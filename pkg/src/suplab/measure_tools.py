"""Finitely-supported per-cell probability measures and their limit facts.

A :class:`DiscreteYoungMeasure` attaches a finite probability measure over
gradient values to every grid cell.  Two facts drive the lower-bound side of
the power-law approximation arguments, and both become exactly computable
here: the Jensen bound for level convex integrands (the mean never beats the
worst atom) and the q -> infinity collapse of mixed power sums onto the
largest atom value.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .energy import DensitySpec, eval_density
from .exponent_space import Grid, GridFunction, StructuralError, _logsumexp
from .reports import RelationReport, Table, eventually_decreasing

__all__ = [
    "DEFAULT_Q_SCHEDULE",
    "DiscreteYoungMeasure",
    "barycenter",
    "jensen_check",
    "young_q_limit",
]

# error decays like log(.)/q, so a geometric schedule shows the trend in few rows
DEFAULT_Q_SCHEDULE = (2, 4, 8, 16, 32, 64, 128, 256, 512, 1024)


@dataclass(frozen=True)
class DiscreteYoungMeasure:
    """Per-cell atoms (points, weights); weights are probabilities summing to one."""

    grid: Grid
    atoms: tuple

    def __post_init__(self):
        if len(self.atoms) != self.grid.n_cells:
            raise StructuralError(
                f"{len(self.atoms)} atom lists for {self.grid.n_cells} cells"
            )
        cleaned = []
        dim = None
        for i, (points, weights) in enumerate(self.atoms):
            pts = np.atleast_2d(np.asarray(points, dtype=float))
            wts = np.asarray(weights, dtype=float).ravel()
            if pts.shape[0] != wts.size:
                pts = pts.T
            if pts.shape[0] != wts.size or wts.size < 1:
                raise StructuralError(f"cell {i}: malformed atoms")
            if dim is None:
                dim = pts.shape[1]
            elif pts.shape[1] != dim:
                raise StructuralError("atom dimension varies across cells")
            if not np.all(wts > 0):
                raise StructuralError(f"cell {i}: atom weights must be positive")
            if abs(wts.sum() - 1.0) > 1e-12:
                raise StructuralError(
                    f"cell {i}: atom weights sum to {wts.sum()!r}, not 1"
                )
            pts.setflags(write=False)
            wts.setflags(write=False)
            cleaned.append((pts, wts))
        object.__setattr__(self, "atoms", tuple(cleaned))

    @property
    def point_dim(self) -> int:
        return self.atoms[0][0].shape[1]

    @classmethod
    def from_field(cls, Du: GridFunction) -> "DiscreteYoungMeasure":
        """The deterministic measure: one unit atom at Du(x) per cell."""
        xi = Du.values if Du.components > 1 else Du.values[:, None]
        atoms = [(xi[i][None, :], np.array([1.0])) for i in range(Du.grid.n_cells)]
        return cls(Du.grid, tuple(atoms))


def barycenter(mu: DiscreteYoungMeasure) -> GridFunction:
    """Cell-wise first moment; with unit atoms this recovers the gradient field."""
    vals = np.array([wts @ pts for pts, wts in mu.atoms])
    return GridFunction(mu.grid, vals)


def jensen_check(f, cell: int, u_val, atoms, tol=1e-10) -> RelationReport:
    """Check f(x, u, mean) <= max over atoms of f(x, u, atom).

    Over a finite support the measure-essential supremum is the plain max.
    ``f`` is a DensitySpec or, for sign-indefinite probes, a bare callable
    xi -> value.  A violation is recorded, not raised: it is evidence the
    integrand is not level convex.
    """
    points, weights = atoms
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    wts = np.asarray(weights, dtype=float).ravel()
    if pts.shape[0] != wts.size:
        pts = pts.T
    mean = wts @ pts

    def value(xi):
        if isinstance(f, DensitySpec):
            return eval_density(f, cell, u_val, xi)
        return float(f(np.atleast_1d(xi)))

    lhs = value(mean)
    rhs = max(value(pts[a]) for a in range(wts.size))
    rep = RelationReport("Jensen bound over atoms")
    rep.add(
        "mean_below_worst_atom",
        lhs <= rhs + tol * (1.0 + abs(rhs)),
        rhs - lhs,
        note=f"f(mean) = {lhs:.6g}, max atom value = {rhs:.6g}",
        witness={"cell": cell, "mean": np.atleast_1d(mean).tolist(), "lhs": lhs, "rhs": rhs},
    )
    return rep


def young_q_limit(f: DensitySpec, u: GridFunction, mu: DiscreteYoungMeasure,
                  q_values=DEFAULT_Q_SCHEDULE) -> Table:
    """Tabulate the mixed q-power means of the density over a Young measure.

    Row value: (sum_i w_i sum_a omega_ia f(x_i, u_i, xi_ia)^q)^(1/q),
    accumulated in the log domain.  As q grows the rows approach the largest
    atom value max_i max_a f(x_i, u_i, xi_ia).
    """
    if mu.grid.n_cells != u.grid.n_cells:
        raise StructuralError("field and measure live on different grids")
    logw = []
    logf = []
    fmax = 0.0
    for i, (pts, wts) in enumerate(mu.atoms):
        for a in range(wts.size):
            val = eval_density(f, i, u.values[i], pts[a])
            if val < 0:
                raise StructuralError("density must be nonnegative on all atoms")
            fmax = max(fmax, val)
            logw.append(np.log(mu.grid.weights[i] * wts[a]))
            logf.append(np.log(val) if val > 0 else -np.inf)
    logw = np.array(logw)
    logf = np.array(logf)

    rows = []
    for q in q_values:
        q = float(q)
        lr = _logsumexp(logw + q * logf)
        val = 0.0 if lr == -np.inf else float(np.exp(lr / q))
        rows.append((int(q), val, abs(val - fmax)))
    errs = [r[2] for r in rows]
    return Table(
        columns=("q", "value", "limit_error"),
        rows=rows,
        verdicts={"error_eventually_decreasing": eventually_decreasing(errs)},
        meta={"limit": fmax, "final_error": errs[-1] if errs else 0.0},
    )
