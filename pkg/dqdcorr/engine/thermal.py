"""Gibbs state ρ(T) = exp(−βH) / Z of the coupled-DQD Hamiltonian.

Boltzmann weights are always taken relative to the ground energy,
w_i = exp(−β(ε_i − ε_min)) ≤ 1, so nothing overflows at large β. The shifted
partition function Z̃ = Σ w_i is what ``ThermalState.z`` holds; the unshifted
Z = Z̃ · exp(−β ε_min).

T = 0 is the equal mixture over the ground eigenspace; T = +inf (β = 0) is I/4.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Literal, NamedTuple

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, ValidationError, field_validator

from .errors import ConsistencyError, InvalidParameterError
from .model import (
    DEGENERACY_TOL,
    ModelParams,
    analytic_energies,
    analytic_spectrum,
    build_hamiltonian,
    derive_couplings,
)
from .numkernel import Mat4, jacobi_eigensolve

logger = logging.getLogger(__name__)

STRUCTURE_TOL = 1e-10
STRUCTURE_FAIL_TOL = 1e-8


class Temperature(BaseModel):
    """Absolute temperature with k_B = 1. ``t = 0`` and ``t = inf`` are both allowed."""

    model_config = ConfigDict(frozen=True)

    t: float

    @field_validator("t")
    @classmethod
    def _non_negative(cls, value: float) -> float:
        if math.isnan(value) or value < 0:
            raise ValueError(f"temperature must be >= 0 (or inf), got {value}")
        return value

    @property
    def beta(self) -> float:
        if self.t == 0:
            return math.inf
        return 1.0 / self.t

    @property
    def is_zero(self) -> bool:
        return self.t == 0

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.t)

    @classmethod
    def zero(cls) -> Temperature:
        return cls(t=0.0)

    @classmethod
    def infinite(cls) -> Temperature:
        return cls(t=math.inf)


def as_temperature(t: Temperature | float) -> Temperature:
    """Coerce a float to ``Temperature``, rejecting negative or NaN values."""
    if isinstance(t, Temperature):
        return t
    try:
        return Temperature(t=t)
    except ValidationError as e:
        raise InvalidParameterError(f"Invalid temperature {t!r}: {e.errors()[0]['msg']}") from e


class RhoElements(NamedTuple):
    """The six independent entries of the thermal density matrix."""

    rho11: float
    rho12: float
    rho13: float
    rho14: float
    rho22: float
    rho23: float


def assemble_rho(el: RhoElements) -> Mat4:
    """Lay the six elements out in the symmetric pattern of the thermal state."""
    a, b, c, d, e, f = el
    rho = np.array(
        [
            [a, b, c, d],
            [b, e, f, c],
            [c, f, e, b],
            [d, c, b, a],
        ]
    )
    rho.setflags(write=False)
    return rho


def elements_of(rho: Mat4) -> RhoElements:
    """Read the six elements back, averaging the positions that share each one."""
    r = np.asarray(rho)
    return RhoElements(
        rho11=float(0.5 * (r[0, 0] + r[3, 3])),
        rho12=float(0.25 * (r[0, 1] + r[1, 0] + r[2, 3] + r[3, 2])),
        rho13=float(0.25 * (r[0, 2] + r[2, 0] + r[1, 3] + r[3, 1])),
        rho14=float(0.5 * (r[0, 3] + r[3, 0])),
        rho22=float(0.5 * (r[1, 1] + r[2, 2])),
        rho23=float(0.5 * (r[1, 2] + r[2, 1])),
    )


def structure_deviation(rho: Mat4) -> float:
    """Max-abs distance between ``rho`` and its projection onto the thermal-state pattern."""
    return float(np.max(np.abs(np.asarray(rho) - assemble_rho(elements_of(rho)))))


@dataclass(frozen=True)
class ThermalState:
    """Gibbs state with its six elements and shifted partition function.

    ``z`` is Z̃ = Σ exp(−β(ε_i − shift)); ``shift`` is the ground energy.
    ``fallback`` is set when the analytic path had to use the numeric one.
    ``structure_error`` is how far the synthesized numeric matrix was from the
    thermal-state pattern before it was re-assembled from its elements.
    """

    rho: Mat4
    elements: RhoElements
    z: float
    shift: float
    params: ModelParams
    temp: Temperature
    source: Literal["analytic", "numeric"]
    fallback: bool = False
    structure_error: float = 0.0

    @property
    def path_flag(self) -> str:
        return "numeric-fallback" if self.fallback else self.source


def boltzmann_weights(
    energies: npt.NDArray[np.float64], temp: Temperature
) -> tuple[npt.NDArray[np.float64], float]:
    """Shifted weights exp(−β(ε − ε_min)) and the shift ε_min.

    At T = 0 the weight is 1 on the ground manifold and 0 elsewhere.
    """
    energies = np.asarray(energies, dtype=np.float64)
    shift = float(np.min(energies))
    if temp.is_infinite:
        return np.ones_like(energies), shift
    if temp.is_zero:
        tol = DEGENERACY_TOL * max(1.0, float(np.max(np.abs(energies))))
        return (energies - shift <= tol).astype(np.float64), shift
    return np.exp(-(energies - shift) / temp.t), shift


def gibbs_analytic(p: ModelParams, t: Temperature | float) -> ThermalState:
    """Gibbs state from the closed-form element expressions.

    Falls back to ``gibbs_numeric`` (flagged) when the closed-form normalizers
    are undefined.
    """
    temp = as_temperature(t)
    spectrum = analytic_spectrum(p)
    if spectrum.source != "analytic":
        state = gibbs_numeric(p, temp)
        return ThermalState(
            rho=state.rho,
            elements=state.elements,
            z=state.z,
            shift=state.shift,
            params=p,
            temp=temp,
            source="numeric",
            fallback=True,
            structure_error=state.structure_error,
        )

    d = derive_couplings(p)
    (w1, w2, w3, w4), shift = boltzmann_weights(spectrum.energies, temp)
    z = float(w1 + w2 + w3 + w4)

    # Normalized amplitudes α·A and α·n; α² alone can overflow when n and A are tiny.
    am, nm = d.alpha_minus * d.a_minus, d.alpha_minus * d.n_minus
    ap, npl = d.alpha_plus * d.a_plus, d.alpha_plus * d.n_plus

    minus_a = am * am * w1 + nm * nm * w2
    plus_a = ap * ap * w3 + npl * npl * w4
    minus_b = nm * nm * w1 + am * am * w2
    plus_b = npl * npl * w3 + ap * ap * w4

    elements = RhoElements(
        rho11=(minus_a + plus_a) / z,
        rho12=(am * nm * (-w1 + w2) + ap * npl * (w3 - w4)) / z,
        rho13=(am * nm * (w1 - w2) + ap * npl * (w3 - w4)) / z,
        rho14=(-minus_a + plus_a) / z,
        rho22=(minus_b + plus_b) / z,
        rho23=(-minus_b + plus_b) / z,
    )
    return ThermalState(
        rho=assemble_rho(elements),
        elements=elements,
        z=z,
        shift=shift,
        params=p,
        temp=temp,
        source="analytic",
    )


def gibbs_numeric(p: ModelParams, t: Temperature | float) -> ThermalState:
    """Gibbs state synthesized from the Jacobi eigendecomposition of H.

    Raises:
        ConsistencyError: the assembled matrix departs from the thermal-state pattern by
            more than 1e-8.
    """
    temp = as_temperature(t)
    dec = jacobi_eigensolve(build_hamiltonian(p))
    weights, shift = boltzmann_weights(dec.values, temp)
    z = float(np.sum(weights))
    rho = (dec.vectors * weights) @ dec.vectors.T / z

    deviation = structure_deviation(rho)
    if deviation > STRUCTURE_FAIL_TOL:
        raise ConsistencyError(
            f"Numeric Gibbs state for {p!r} at T={temp.t} breaks the thermal-state "
            f"pattern by {deviation:.3e}"
        )
    if deviation > STRUCTURE_TOL:
        logger.warning(f"Numeric Gibbs state structure deviation {deviation:.3e} for {p!r}")

    elements = elements_of(rho)
    return ThermalState(
        rho=assemble_rho(elements),
        elements=elements,
        z=z,
        shift=shift,
        params=p,
        temp=temp,
        source="numeric",
        structure_error=deviation,
    )


@dataclass(frozen=True)
class PartitionFunction:
    """Z̃ = Σ exp(−β(ε_i − shift)) with the shift (the ground energy)."""

    z_shifted: float
    shift: float
    beta: float

    @property
    def log_z(self) -> float:
        """ln Z = ln Z̃ − β·shift; finite for every T > 0."""
        return math.log(self.z_shifted) - self.beta * self.shift

    def unshifted(self) -> float:
        """Z itself, or ``math.inf`` when exp(−β·shift) overflows."""
        try:
            return self.z_shifted * math.exp(-self.beta * self.shift)
        except OverflowError:
            return math.inf


def partition_function(p: ModelParams, t: Temperature | float) -> PartitionFunction:
    """Shifted partition function from the closed-form energies.

    Raises:
        InvalidParameterError: T = 0, where Z is undefined.
    """
    temp = as_temperature(t)
    if temp.is_zero:
        raise InvalidParameterError(
            "Partition function is undefined at T = 0; use gibbs_analytic for the limit"
        )
    weights, shift = boltzmann_weights(analytic_energies(p), temp)
    beta = 0.0 if temp.is_infinite else temp.beta
    return PartitionFunction(z_shifted=float(np.sum(weights)), shift=shift, beta=beta)


def purity(state: ThermalState) -> float:
    """Tr ρ²."""
    return float(np.sum(state.rho * state.rho))
