"""Parameter sweeps, threshold temperatures and figure datasets.

Every grid point is an independent pure evaluation, so sweeps fan out over a
process pool and are reassembled in grid order.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Literal, NamedTuple, TypeVar

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..version import __version__
from .config import resolve_workers
from .correlations import (
    INCOHERENT_THETA,
    THETA_MAX,
    MeasureSet,
    concurrence_analytic,
    correlated_coherence,
)
from .errors import ConsistencyError, InvalidParameterError
from .model import ModelParams, Spectrum, analytic_energies, analytic_spectrum
from .thermal import Temperature, ThermalState, as_temperature, gibbs_analytic

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

Axis = Literal["temperature", "coulomb", "delta1", "delta2"]
FigureId = Literal["fig2", "fig3", "fig4", "fig5a", "fig5b", "fig5c", "fig6"]

DEFAULT_POINTS = 400
PRESCAN_POINTS = 200
MAX_BRACKET_DOUBLINGS = 64


class SweepSpec(BaseModel):
    """One single-axis sweep. ``params`` and ``temperature`` fix the other inputs."""

    model_config = ConfigDict(frozen=True)

    axis: Axis
    start: float
    stop: float
    points: int = Field(ge=2)
    params: ModelParams
    temperature: float | None = None  # required unless axis == "temperature"
    theta: float = INCOHERENT_THETA
    log_scale: bool = False
    label: str = ""
    reference_curve: bool = True

    @model_validator(mode="after")
    def _check(self) -> SweepSpec:
        if not (math.isfinite(self.start) and math.isfinite(self.stop)):
            raise ValueError("start and stop must be finite")
        if not self.start < self.stop:
            raise ValueError(f"start must be < stop, got start={self.start}, stop={self.stop}")
        if self.log_scale and self.start <= 0:
            raise ValueError("log_scale needs start > 0")
        if self.axis == "temperature":
            if self.start < 0:
                raise ValueError("temperature sweep must start at t >= 0")
        elif self.temperature is None:
            raise ValueError(f"temperature is required for a {self.axis} sweep")
        elif math.isnan(self.temperature) or self.temperature < 0:
            raise ValueError(f"temperature must be >= 0 (or inf), got {self.temperature}")
        if not (0.0 <= self.theta <= THETA_MAX):
            raise ValueError(f"theta must lie in [0, pi/2], got {self.theta}")
        return self

    def axis_values(self) -> npt.NDArray[np.float64]:
        if self.log_scale:
            return np.geomspace(self.start, self.stop, self.points)
        return np.linspace(self.start, self.stop, self.points)

    def point_inputs(self, value: float) -> tuple[ModelParams, float]:
        """(params, temperature) at one value of the swept axis."""
        p = self.params
        if self.axis == "temperature":
            return p, value
        if self.axis == "coulomb":
            p = ModelParams(delta1=p.delta1, delta2=p.delta2, v=value)
        elif self.axis == "delta1":
            p = ModelParams(delta1=value, delta2=p.delta2, v=p.v)
        else:
            p = ModelParams(delta1=p.delta1, delta2=value, v=p.v)
        return p, self.temperature  # type: ignore[return-value]


class SweepRow(NamedTuple):
    axis_value: float
    concurrence: float
    c_l1_total: float
    c_l1_local: float
    c_cc: float
    path_flag: str


@dataclass
class SweepResult:
    """Rows in grid order plus the spec that produced them."""

    rows: list[SweepRow]
    spec: SweepSpec
    provenance: dict[str, str] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {
            "axis": self.spec.axis,
            "label": self.spec.label,
            "reference_curve": self.spec.reference_curve,
            "spec": self.spec.model_dump(),
            "provenance": self.provenance,
            "rows": [row._asdict() for row in self.rows],
        }


@dataclass(frozen=True)
class PointReport:
    """Everything the ``point`` command prints for one (params, T)."""

    params: ModelParams
    temp: Temperature
    spectrum: Spectrum
    state: ThermalState
    measures: MeasureSet

    @property
    def ground_amplitudes(self) -> npt.NDArray[np.float64]:
        return self.spectrum.ground_state

    @property
    def path_flag(self) -> str:
        return self.state.path_flag


def evaluate_point(
    p: ModelParams, t: Temperature | float, theta: float = INCOHERENT_THETA
) -> PointReport:
    temp = as_temperature(t)
    state = gibbs_analytic(p, temp)
    return PointReport(
        params=p,
        temp=temp,
        spectrum=analytic_spectrum(p),
        state=state,
        measures=correlated_coherence(state, theta),
    )


def _evaluate_row(item: tuple[ModelParams, float, float, float]) -> SweepRow:
    p, t, theta, axis_value = item
    state = gibbs_analytic(p, t)
    m = correlated_coherence(state, theta)
    return SweepRow(
        axis_value=axis_value,
        concurrence=m.concurrence,
        c_l1_total=m.c_l1_total,
        c_l1_local=m.c_l1_local,
        c_cc=m.c_cc,
        path_flag=state.path_flag,
    )


def parallel_map(fn: Callable[[T], R], items: Iterable[T], workers: int | None = None) -> list[R]:
    """``map`` over a process pool; results come back in input order.

    ``fn`` must be a module-level function. ``workers=1`` runs in-process.
    """
    items = list(items)
    n_workers = resolve_workers(workers)
    if n_workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    n_workers = min(n_workers, len(items))
    chunksize = max(1, len(items) // (4 * n_workers))
    with ProcessPoolExecutor(max_workers=n_workers) as ex:
        return list(ex.map(fn, items, chunksize=chunksize))


def run_sweep(spec: SweepSpec, workers: int | None = None) -> SweepResult:
    values = spec.axis_values()
    items = []
    for value in values:
        p, t = spec.point_inputs(float(value))
        items.append((p, t, spec.theta, float(value)))

    logger.info(f"Sweep {spec.label or spec.axis}: {spec.points} points over {spec.axis}")
    rows = parallel_map(_evaluate_row, items, workers)
    flags = sorted({row.path_flag for row in rows})
    if "numeric-fallback" in flags:
        n_fallback = sum(row.path_flag == "numeric-fallback" for row in rows)
        logger.warning(f"Sweep {spec.label or spec.axis}: {n_fallback} points on the numeric path")
    return SweepResult(
        rows=rows,
        spec=spec,
        provenance={"engine": f"dqdcorr {__version__}", "paths": ",".join(flags)},
    )


def _concurrence_at(p: ModelParams, t: float) -> float:
    return concurrence_analytic(gibbs_analytic(p, t))


def threshold_temperature(
    p: ModelParams,
    t_lo: float = 0.0,
    t_hi: float | None = None,
    tol: float = 1e-4,
    prescan_points: int = PRESCAN_POINTS,
) -> float:
    """Smallest T above which the concurrence stays zero.

    A pre-scan of ``prescan_points`` temperatures over [t_lo, t_hi] finds the
    last positive point, then bisection on C(T) > 0 narrows it to ``tol``.
    Without ``t_hi`` the bracket starts at max(1, max|ε|) and doubles until
    C(t_hi) = 0.

    Raises:
        InvalidParameterError: bad tolerance or bracket, or C(t_lo) = 0 or
            C(t_hi) > 0 (both endpoint values are reported).
    """
    if not tol > 0:
        raise InvalidParameterError(f"tol must be > 0, got {tol}")
    if prescan_points < 2:
        raise InvalidParameterError(f"prescan_points must be >= 2, got {prescan_points}")
    as_temperature(t_lo)

    c_lo = _concurrence_at(p, t_lo)
    if t_hi is None:
        t_hi = max(1.0, float(np.max(np.abs(analytic_energies(p)))), t_lo * 2.0)
        c_hi = _concurrence_at(p, t_hi)
        if c_lo > 0:
            doublings = 0
            while c_hi > 0:
                if doublings >= MAX_BRACKET_DOUBLINGS:
                    raise ConsistencyError(f"Concurrence of {p!r} still positive at T={t_hi}")
                t_hi *= 2.0
                c_hi = _concurrence_at(p, t_hi)
                doublings += 1
    else:
        as_temperature(t_hi)
        if not t_hi > t_lo:
            raise InvalidParameterError(f"t_hi must be > t_lo, got t_lo={t_lo}, t_hi={t_hi}")
        c_hi = _concurrence_at(p, t_hi)

    if not (c_lo > 0 and c_hi == 0):
        raise InvalidParameterError(
            f"Threshold not bracketed for {p!r}: C(t_lo={t_lo}) = {c_lo:.12g}, "
            f"C(t_hi={t_hi}) = {c_hi:.12g}; need C(t_lo) > 0 and C(t_hi) = 0"
        )

    grid = np.linspace(t_lo, t_hi, prescan_points)
    positive = [i for i, t in enumerate(grid) if _concurrence_at(p, float(t)) > 0]
    last = positive[-1]
    lo, hi = float(grid[last]), float(grid[last + 1])

    iterations = 0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _concurrence_at(p, mid) > 0:
            lo = mid
        else:
            hi = mid
        iterations += 1
        logger.debug(f"Bisection step {iterations}: [{lo:.12g}, {hi:.12g}]")

    t_star = 0.5 * (lo + hi)
    logger.info(f"Threshold temperature for {p!r}: {t_star:.6g} ({iterations} bisection steps)")
    return t_star


def _params(d1: float, d2: float, v: float) -> ModelParams:
    return ModelParams(delta1=d1, delta2=d2, v=v)


def _temperature_curve(
    label: str,
    params: ModelParams,
    start: float,
    stop: float,
    points: int,
    log_scale: bool,
    theta: float = INCOHERENT_THETA,
    reference_curve: bool = True,
) -> SweepSpec:
    return SweepSpec(
        axis="temperature",
        start=start,
        stop=stop,
        points=points,
        params=params,
        theta=theta,
        log_scale=log_scale,
        label=label,
        reference_curve=reference_curve,
    )


def figure_specs(figure_id: FigureId, points: int = DEFAULT_POINTS) -> list[SweepSpec]:
    """Sweep specs of every curve in one figure, in legend order."""
    d1, d2 = 10.0, 15.0
    if figure_id == "fig2":
        curves = [("v16d1", 16 * d1), ("v8d1", 8 * d1), ("vd1over3", d1 / 3), ("vd1over6", d1 / 6)]
        return [
            _temperature_curve(label, _params(d1, d2, v), 0.0, 100.0, points, False)
            for label, v in curves
        ]
    if figure_id == "fig3":
        # Only the Δ1 = 1 curve is quoted numerically; the larger values are assumed.
        return [
            _temperature_curve(
                f"d1_{delta1:g}",
                ModelParams(delta1=delta1, delta2=8.0, v=20.0),
                0.0,
                100.0,
                points,
                False,
                reference_curve=delta1 == 1.0,
            )
            for delta1 in (1.0, 2.0, 5.0, 10.0)
        ]
    if figure_id == "fig4":
        return [
            SweepSpec(
                axis="coulomb",
                start=0.0,
                stop=50.0,
                points=points,
                params=ModelParams(delta1=delta, delta2=delta, v=0.0),
                temperature=0.1,
                label=f"d_{delta:g}",
            )
            for delta in (1.0, 2.0, 5.0, 10.0)
        ]
    if figure_id in ("fig5a", "fig5b", "fig5c"):
        label, theta = {
            "fig5a": ("theta_0", 0.0),
            "fig5b": ("theta_0.95pi4", 0.95 * INCOHERENT_THETA),
            "fig5c": ("theta_pi4", INCOHERENT_THETA),
        }[figure_id]
        params = ModelParams(delta1=d1, delta2=d2, v=16 * d1)
        return [_temperature_curve(label, params, 0.01, 1000.0, points, True, theta=theta)]
    if figure_id == "fig6":
        return [
            _temperature_curve(label, _params(d1, d2, v), 0.01, 100.0, points, True)
            for label, v in (("v_d1", d1), ("v_d1over3", d1 / 3))
        ]
    raise InvalidParameterError(f"Unknown figure: {figure_id!r}")


FIGURES: tuple[FigureId, ...] = ("fig2", "fig3", "fig4", "fig5a", "fig5b", "fig5c", "fig6")


def figure_dataset(
    figure_id: FigureId, points: int | None = None, workers: int | None = None
) -> list[SweepResult]:
    """One ``SweepResult`` per curve of the figure."""
    specs = figure_specs(figure_id, DEFAULT_POINTS if points is None else points)
    logger.info(f"Figure {figure_id}: {len(specs)} curves")
    return [run_sweep(spec, workers) for spec in specs]
