"""Energy densities f(x, u, xi) and the three power-law functionals built on them.

Built-in families are level convex by construction:

* ``weighted_norm``     f = a(x) |xi|
* ``shifted_norm``      f = |xi - b(x)|
* ``anisotropic``       f = max_j a_j(x) |xi_j|

Custom densities are a named closed-form rule from the registry plus
tabulated coefficient fields, so probe reports can cite parameters instead
of opaque callables.  The two hypotheses a density must satisfy for the
approximation theory, level convexity in xi and the coercivity bound
f >= alpha |xi|^gamma, are verified statistically by the probes below.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exponent_space import (
    OVERFLOW_LOG,
    ExponentField,
    Grid,
    GridFunction,
    StructuralError,
    _logsumexp,
    _require_same_grid,
    luxemburg_norm,
)
from .reports import RelationReport

__all__ = [
    "BUILTIN_FAMILIES",
    "DensityContractError",
    "DensitySpec",
    "register_custom_rule",
    "custom_rule_names",
    "eval_density",
    "density_field",
    "eval_supremal",
    "eval_Fn",
    "eval_calFn",
    "level_convexity_probe",
    "growth_check",
]

BUILTIN_FAMILIES = ("weighted_norm", "shifted_norm", "anisotropic")


class DensityContractError(ValueError):
    """A custom rule produced a negative or non-finite value."""


_CUSTOM_RULES: dict = {}


def register_custom_rule(name: str, fn) -> None:
    """Register a closed-form rule fn(coeffs, u_val, xi) -> float for custom densities."""
    _CUSTOM_RULES[name] = fn


def custom_rule_names():
    return tuple(sorted(_CUSTOM_RULES))


def _rule_unit_sphere_distance(coeffs, u_val, xi):
    # distance of |xi| from 1; sublevel sets are annuli, so NOT level convex
    return abs(np.linalg.norm(xi) - 1.0)


def _rule_capped_norm(coeffs, u_val, xi):
    # min(|xi|, cap) + slope |xi|: a monotone transform of the norm, level convex
    r = np.linalg.norm(xi)
    return min(r, coeffs.get("cap", 1.0)) + coeffs.get("slope", 1e-6) * r


def _rule_weighted_norm_power(coeffs, u_val, xi):
    # (a(x) |xi|)^power: level convex for any power > 0, growth exponent = power
    return (coeffs["a"] * np.linalg.norm(xi)) ** coeffs["power"]


register_custom_rule("unit_sphere_distance", _rule_unit_sphere_distance)
register_custom_rule("capped_norm", _rule_capped_norm)
register_custom_rule("weighted_norm_power", _rule_weighted_norm_power)


@dataclass(frozen=True)
class DensitySpec:
    """Parametric density with declared growth constants and convexity flag."""

    grid: Grid
    family: str
    coefficients: dict = field(default_factory=dict)
    alpha: float = 1.0
    gamma: float = 1.0
    level_convex: bool = True
    rule: str | None = None

    def __post_init__(self):
        if self.family not in BUILTIN_FAMILIES + ("custom",):
            raise StructuralError(f"unknown density family {self.family!r}")
        if not (self.alpha > 0 and self.gamma > 0):
            raise StructuralError("growth constants alpha, gamma must be positive")
        coeffs = {}
        for key, val in self.coefficients.items():
            arr = np.asarray(val, dtype=float)
            if arr.ndim == 0:
                coeffs[key] = float(arr)
            else:
                arr = np.array(arr, dtype=float)
                arr.setflags(write=False)
                coeffs[key] = arr
        object.__setattr__(self, "coefficients", coeffs)
        if self.family == "weighted_norm" and "a" not in coeffs:
            raise StructuralError("weighted_norm needs an 'a' coefficient field")
        if self.family == "shifted_norm" and "b" not in coeffs:
            raise StructuralError("shifted_norm needs a 'b' coefficient field")
        if self.family == "anisotropic" and "a" not in coeffs:
            raise StructuralError("anisotropic needs an 'a' coefficient field")
        if self.family == "custom":
            if self.rule is None or self.rule not in _CUSTOM_RULES:
                raise StructuralError(
                    f"custom density needs a registered rule, got {self.rule!r}"
                )

    @classmethod
    def weighted_norm(cls, grid: Grid, a, alpha=None, gamma=1.0) -> "DensitySpec":
        a_vals = _coefficient(grid, a)
        if alpha is None:
            alpha = float(np.min(a_vals))
        return cls(grid, "weighted_norm", {"a": a_vals}, alpha=alpha, gamma=gamma)

    @classmethod
    def shifted_norm(cls, grid: Grid, b, alpha=1e-6, gamma=1.0) -> "DensitySpec":
        return cls(grid, "shifted_norm", {"b": np.asarray(b, dtype=float)},
                   alpha=alpha, gamma=gamma)

    @classmethod
    def anisotropic(cls, grid: Grid, a, alpha=None, gamma=1.0) -> "DensitySpec":
        a_arr = np.asarray(a, dtype=float)
        if alpha is None:
            k = a_arr.shape[-1] if a_arr.ndim > 1 else 1
            alpha = float(np.min(a_arr)) / np.sqrt(k)
        return cls(grid, "anisotropic", {"a": a_arr}, alpha=alpha, gamma=gamma)

    @classmethod
    def custom(cls, grid: Grid, rule: str, coefficients=None, alpha=1e-6,
               gamma=1.0, level_convex=True) -> "DensitySpec":
        return cls(grid, "custom", dict(coefficients or {}), alpha=alpha,
                   gamma=gamma, level_convex=level_convex, rule=rule)

    def coefficient_at(self, key, cell):
        """Per-cell slice of a coefficient; arrays not indexed by cell broadcast."""
        val = self.coefficients[key]
        if isinstance(val, float):
            return val
        if val.shape[0] == self.grid.n_cells:
            return val[cell]
        return val


def _coefficient(grid, a):
    if callable(a):
        pts = grid.cells[:, 0] if grid.dimension == 1 else grid.cells
        return np.asarray(a(pts), dtype=float)
    arr = np.asarray(a, dtype=float)
    if arr.ndim == 0:
        return np.full(grid.n_cells, float(arr))
    return arr


def eval_density(f: DensitySpec, cell: int, u_val, xi) -> float:
    """Evaluate the density at one cell; custom rules must stay nonnegative."""
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    if f.family == "weighted_norm":
        return float(f.coefficient_at("a", cell) * np.linalg.norm(xi))
    if f.family == "shifted_norm":
        b = np.atleast_1d(np.asarray(f.coefficient_at("b", cell), dtype=float))
        if b.shape != xi.shape:
            raise StructuralError(f"shift has shape {b.shape}, xi has shape {xi.shape}")
        return float(np.linalg.norm(xi - b))
    if f.family == "anisotropic":
        a = np.atleast_1d(np.asarray(f.coefficient_at("a", cell), dtype=float))
        if a.shape != xi.shape:
            raise StructuralError(f"anisotropy has shape {a.shape}, xi has shape {xi.shape}")
        return float(np.max(a * np.abs(xi)))
    coeffs = {k: f.coefficient_at(k, cell) for k in f.coefficients}
    val = float(_CUSTOM_RULES[f.rule](coeffs, u_val, xi))
    if not np.isfinite(val) or val < 0:
        raise DensityContractError(
            f"custom rule {f.rule!r} returned {val} at cell {cell}"
        )
    return val


def density_field(f: DensitySpec, u: GridFunction | None, Du: GridFunction) -> GridFunction:
    """Cell-wise density values f(x_i, u_i, Du_i) as a scalar grid function."""
    grid = Du.grid
    xi = Du.values if Du.components > 1 else Du.values[:, None]
    if f.family == "weighted_norm":
        vals = f.coefficients["a"] * np.linalg.norm(xi, axis=1)
    elif f.family == "shifted_norm":
        b = np.asarray(f.coefficients["b"], dtype=float)
        b = np.broadcast_to(b, xi.shape)
        vals = np.linalg.norm(xi - b, axis=1)
    elif f.family == "anisotropic":
        a = np.asarray(f.coefficients["a"], dtype=float)
        a = a[None, :] if a.ndim == 1 else a
        vals = np.max(np.broadcast_to(a, xi.shape) * np.abs(xi), axis=1)
    else:
        uvals = u.values if u is not None else np.zeros(grid.n_cells)
        vals = np.array(
            [eval_density(f, i, uvals[i], xi[i]) for i in range(grid.n_cells)]
        )
    return GridFunction(grid, vals)


def eval_supremal(f: DensitySpec, u: GridFunction | None, Du: GridFunction) -> float:
    """Supremal energy: the largest cell value of the density."""
    return float(np.max(density_field(f, u, Du).values))


def eval_Fn(f: DensitySpec, u: GridFunction | None, Du: GridFunction,
            p: ExponentField) -> float:
    """Variable-exponent norm of the density field."""
    vals = density_field(f, u, Du)
    _require_same_grid(vals, p)
    return luxemburg_norm(vals, p)


def eval_calFn(f: DensitySpec, u: GridFunction | None, Du: GridFunction,
               p: ExponentField) -> float:
    """Exponent-normalized power integral sum_i (w_i / p_i) f_i^{p_i}.

    Returns the +inf sentinel once the log-domain accumulator passes the
    overflow cap; vanishing cells contribute nothing.
    """
    vals = density_field(f, u, Du)
    _require_same_grid(vals, p)
    mask = vals.values > 0
    if not np.any(mask):
        return 0.0
    terms = (
        vals.grid.log_weights[mask]
        - np.log(p.values[mask])
        + p.values[mask] * np.log(vals.values[mask])
    )
    lr = _logsumexp(terms)
    if lr > OVERFLOW_LOG:
        return np.inf
    return float(np.exp(lr))


def _random_xi(rng, k, scale):
    return scale * rng.normal(size=k)


def level_convexity_probe(f: DensitySpec, trials=10000, seed=0, xi_dim=None,
                          scale=2.0, max_witnesses=10) -> RelationReport:
    """Randomized search for level-convexity violations along segments.

    Draws (cell, u, xi1, xi2, theta) and checks
    f(theta xi1 + (1-theta) xi2) <= max(f(xi1), f(xi2)).
    Violations are returned with witnesses; they are evidence the density is
    not level convex, not an error.
    """
    rng = np.random.default_rng(seed)
    k = xi_dim or f.grid.dimension
    witnesses = []
    violations = 0
    worst = np.inf
    for _ in range(trials):
        cell = int(rng.integers(f.grid.n_cells))
        u_val = float(rng.normal())
        xi1 = _random_xi(rng, k, scale)
        xi2 = _random_xi(rng, k, scale)
        theta = float(rng.uniform())
        lhs = eval_density(f, cell, u_val, theta * xi1 + (1 - theta) * xi2)
        rhs = max(eval_density(f, cell, u_val, xi1), eval_density(f, cell, u_val, xi2))
        margin = rhs - lhs
        worst = min(worst, margin)
        if lhs > rhs + 1e-10 * (1.0 + abs(rhs)):
            violations += 1
            if len(witnesses) < max_witnesses:
                witnesses.append(
                    {"cell": cell, "u": u_val, "xi1": xi1.tolist(),
                     "xi2": xi2.tolist(), "theta": theta, "lhs": lhs, "rhs": rhs}
                )
    rep = RelationReport(f"level convexity of {f.family}")
    rep.add(
        "level_convexity",
        violations == 0,
        worst,
        note=f"{violations}/{trials} violations",
        witness=witnesses[0] if witnesses else None,
    )
    rep.meta = {"witnesses": witnesses, "violations": violations, "trials": trials}
    return rep


def growth_check(f: DensitySpec, trials=10000, seed=0, xi_dim=None,
                 scale=2.0, max_witnesses=10) -> RelationReport:
    """Randomized check of the coercivity bound f(x, u, xi) >= alpha |xi|^gamma."""
    rng = np.random.default_rng(seed)
    k = xi_dim or f.grid.dimension
    witnesses = []
    violations = 0
    worst = np.inf
    for _ in range(trials):
        cell = int(rng.integers(f.grid.n_cells))
        u_val = float(rng.normal())
        xi = _random_xi(rng, k, scale)
        val = eval_density(f, cell, u_val, xi)
        bound = f.alpha * float(np.linalg.norm(xi)) ** f.gamma
        margin = val - bound
        worst = min(worst, margin)
        if val < bound - 1e-12 * (1.0 + bound):
            violations += 1
            if len(witnesses) < max_witnesses:
                center = f.grid.cells[cell]
                witnesses.append(
                    {"cell": cell, "cell_center": center.tolist(), "u": u_val,
                     "xi": xi.tolist(), "value": val, "bound": bound}
                )
    rep = RelationReport(f"growth bound of {f.family}")
    rep.add(
        "growth_lower_bound",
        violations == 0,
        worst,
        note=f"{violations}/{trials} violations (alpha={f.alpha}, gamma={f.gamma})",
        witness=witnesses[0] if witnesses else None,
    )
    rep.meta = {"witnesses": witnesses, "violations": violations, "trials": trials}
    return rep
