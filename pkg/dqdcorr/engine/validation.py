"""Analytic-versus-numeric oracle report.

Every closed-form result of the engine is recomputed independently (Jacobi
spectrum, Gibbs state synthesized from eigenvectors, R spectrum from √ρ) on a
grid of (Δ1, Δ2, V, T) points, and the largest deviation per category is
compared with its tolerance.

The randomized grids are prefixes of one seeded stream, so ``coarse`` is a
subset of ``default`` for the same seed.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .correlations import (
    concurrence_analytic,
    concurrence_numeric,
    concurrence_printed_form,
    correlated_coherence,
    correlated_coherence_closed_form,
    printed_sigma_lambdas,
    r_eigenvalues_numeric,
    r_spectrum_analytic,
)
from .errors import InvalidParameterError, ValidationFailedError
from .model import (
    ModelParams,
    analytic_energies,
    analytic_spectrum,
    build_hamiltonian,
    eigen_residual,
    numeric_spectrum,
)
from .numkernel import jacobi_eigensolve
from .scan import parallel_map
from .thermal import gibbs_analytic, gibbs_numeric

logger = logging.getLogger(__name__)

GridName = Literal["default", "coarse", "full"]

GRID_POINTS = {"default": 8000, "coarse": 500}
DELTA_MAX = 20.0
COULOMB_MAX = 200.0
LOG10_T_RANGE = (-2.0, 3.0)

# (name, tolerance); None marks an informational category that never fails.
CATEGORIES: tuple[tuple[str, float | None], ...] = (
    ("spectrum", 1e-10),
    ("eigenvector_residual", 1e-9),
    ("rho_elements", 1e-10),
    ("trace", 1e-12),
    ("positivity", 1e-12),
    ("structure", 1e-10),
    ("commutator", 1e-10),
    ("r_eigenvalues", 1e-9),
    ("concurrence", 1e-9),
    ("cc_closed_form", 1e-12),
    ("printed_wootters", 1e-9),
    ("local_coherence", 1e-12),
    ("hierarchy", 1e-10),
    ("printed_sigma", None),
)

GridPoint = tuple[float, float, float, float]


def grid_points(
    grid: GridName = "default", seed: int = 0, points: int | None = None
) -> list[GridPoint]:
    """(Δ1, Δ2, V, T) validation points.

    ``default`` and ``coarse`` draw Δ1, Δ2 ∈ [0, 20], V ∈ [0, 200] uniformly and
    T log-uniformly in [1e-2, 1e3]. ``full`` is the structured 20×20×20 grid
    times 10 temperatures.
    """
    if grid == "full":
        deltas = np.linspace(0.0, DELTA_MAX, 20)
        coulombs = np.linspace(0.0, COULOMB_MAX, 20)
        temps = np.geomspace(10 ** LOG10_T_RANGE[0], 10 ** LOG10_T_RANGE[1], 10)
        full = [
            (float(d1), float(d2), float(v), float(t))
            for d1, d2, v, t in itertools.product(deltas, deltas, coulombs, temps)
        ]
        return full[:points] if points else full
    if grid not in GRID_POINTS:
        raise InvalidParameterError(f"Unknown grid {grid!r}; use default, coarse or full")

    n = points or GRID_POINTS[grid]
    if n < 1:
        raise InvalidParameterError(f"points must be >= 1, got {n}")
    u = np.random.default_rng(seed).uniform(size=(n, 4))
    lo, hi = LOG10_T_RANGE
    return [
        (DELTA_MAX * a, DELTA_MAX * b, COULOMB_MAX * c, 10.0 ** (lo + (hi - lo) * d))
        for a, b, c, d in u.tolist()
    ]


def _check_point(point: GridPoint) -> dict[str, float]:
    """Deviation of every category at one grid point."""
    d1, d2, v, t = point
    p = ModelParams(delta1=d1, delta2=d2, v=v)

    energies = analytic_energies(p)
    numeric = numeric_spectrum(p)
    spectrum_dev = float(np.max(np.abs(numeric.energies - energies)))
    residual = eigen_residual(p, analytic_spectrum(p))

    s = gibbs_analytic(p, t)
    s_num = gibbs_numeric(p, t)
    rho_dev = float(np.max(np.abs(np.subtract(s.elements, s_num.elements))))
    trace_dev = abs(float(np.trace(s.rho)) - 1.0)
    rho_values = jacobi_eigensolve(s.rho).values
    positivity = max(0.0, -float(rho_values[0]), float(rho_values[-1]) - 1.0)
    h = build_hamiltonian(p)
    commutator = float(np.max(np.abs(s.rho @ h - h @ s.rho)))

    lambdas = r_spectrum_analytic(s).lambdas
    lambdas_num = r_eigenvalues_numeric(s_num)
    c = concurrence_analytic(s)
    measures = correlated_coherence(s)
    return {
        "spectrum": spectrum_dev,
        "eigenvector_residual": residual,
        "rho_elements": rho_dev,
        "trace": trace_dev,
        "positivity": positivity,
        "structure": s_num.structure_error,
        "commutator": commutator,
        "r_eigenvalues": float(np.max(np.abs(lambdas - lambdas_num))),
        "concurrence": abs(c - concurrence_numeric(s_num)),
        "cc_closed_form": abs(correlated_coherence_closed_form(s) - measures.c_cc),
        "printed_wootters": abs(concurrence_printed_form(s) - c),
        "local_coherence": measures.c_l1_local,
        "hierarchy": max(0.0, c - measures.c_cc),
        "printed_sigma": float(
            np.max(np.abs(np.sort(printed_sigma_lambdas(s))[::-1] - lambdas_num))
        ),
    }


@dataclass
class ValidationCategory:
    name: str
    tolerance: float | None
    max_deviation: float = 0.0
    worst_point: GridPoint | None = None

    @property
    def informational(self) -> bool:
        return self.tolerance is None

    @property
    def passed(self) -> bool:
        return self.tolerance is None or self.max_deviation <= self.tolerance

    def update(self, deviation: float, point: GridPoint) -> None:
        # NaN sticks as the worst value.
        if self.worst_point is not None and math.isnan(self.max_deviation):
            return
        if self.worst_point is None or math.isnan(deviation) or deviation > self.max_deviation:
            self.max_deviation = deviation
            self.worst_point = point


@dataclass
class ValidationReport:
    grid: str
    seed: int
    points: int
    categories: list[ValidationCategory] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.categories)

    @property
    def failures(self) -> list[ValidationCategory]:
        return [c for c in self.categories if not c.passed]

    def to_text(self) -> str:
        lines = [f"validation grid={self.grid} seed={self.seed} points={self.points}"]
        for c in self.categories:
            if c.informational:
                status, tol = "INFO", "-"
            else:
                status, tol = ("PASS" if c.passed else "FAIL"), f"{c.tolerance:.0e}"
            line = f"{c.name:<22} max={c.max_deviation:.3e} tol={tol:<6} {status}"
            if not c.passed or c.informational:
                line += f" at {_format_point(c.worst_point)}"
            lines.append(line)
        lines.append("overall: PASS" if self.passed else "overall: FAIL")
        return "\n".join(lines) + "\n"

    def check(self) -> None:
        """Raise ``ValidationFailedError`` naming each failing category and point."""
        if self.passed:
            return
        details = "; ".join(
            f"{c.name} {c.max_deviation:.3e} > {c.tolerance:.0e} at {_format_point(c.worst_point)}"
            for c in self.failures
        )
        raise ValidationFailedError(f"Validation failed: {details}")


def _format_point(point: GridPoint | None) -> str:
    if point is None:
        return "-"
    d1, d2, v, t = point
    return f"(d1={d1:.12g}, d2={d2:.12g}, v={v:.12g}, t={t:.12g})"


def run_validation(
    grid: GridName = "default",
    seed: int = 0,
    points: int | None = None,
    workers: int | None = None,
) -> ValidationReport:
    pts = grid_points(grid, seed, points)
    logger.info(f"Validating {len(pts)} points (grid={grid}, seed={seed})")
    results = parallel_map(_check_point, pts, workers)

    report = ValidationReport(
        grid=grid,
        seed=seed,
        points=len(pts),
        categories=[ValidationCategory(name, tol) for name, tol in CATEGORIES],
    )
    for point, deviations in zip(pts, results):
        for category in report.categories:
            category.update(deviations[category.name], point)

    for c in report.failures:
        logger.warning(
            f"Validation category {c.name} failed: {c.max_deviation:.3e} > {c.tolerance:.0e} "
            f"at {_format_point(c.worst_point)}"
        )
    logger.info(f"Validation {'passed' if report.passed else 'failed'} on {len(pts)} points")
    return report
