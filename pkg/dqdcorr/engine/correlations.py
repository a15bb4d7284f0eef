"""Quantum-correlation measures of the two-qubit thermal state.

Concurrence follows Wootters: with R = ρ ρ̃, ρ̃ = (σy⊗σy) ρ* (σy⊗σy), and the
square roots of R's eigenvalues sorted descending,

    C = max{0, √λ̂1 − √λ̂2 − √λ̂3 − √λ̂4}.

For the thermal states of this model R splits into a parity-odd and a
parity-even 2x2 block. In the basis (|LL⟩ ± |RR⟩, |LR⟩ ± |RL⟩)/√2 the state
block is [[p, q], [q, r]] with

    even:  p = ρ11 + ρ14,  q = ρ12 + ρ13,  r = ρ22 + ρ23
    odd:   p = ρ11 − ρ14,  q = ρ12 − ρ13,  r = ρ22 − ρ23

and the two R eigenvalues of a block are Θ/2 ± ½√(Ξ² − Σ²) with
Θ = p² − 2q² + r², Ξ = p² − r², Σ = 2q(r − p) (even) or 2q(p − r) (odd).
λ1, λ2 come from the odd block and λ3, λ4 from the even block.

Coherence is the l1 norm of the off-diagonal part, evaluated after a local
rotation U(θ) on each qubit; the correlated coherence is the global value minus
both local values.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass

import numpy as np
import numpy.typing as npt

from .errors import ConsistencyError, InvalidParameterError, UnsupportedParameterError
from .numkernel import (
    SIGMA_Y_SIGMA_Y,
    Mat2,
    Mat4,
    conjugate,
    jacobi_eigensolve,
    kron2,
    mat2,
)
from .thermal import RhoElements, ThermalState

logger = logging.getLogger(__name__)

CLAMP_TOL = 1e-9
THETA_MAX = math.pi / 2
INCOHERENT_THETA = math.pi / 4


@dataclass(frozen=True)
class RSpectrum:
    """Eigenvalues of R for a thermal state, with the block intermediates.

    ``lambdas`` is sorted descending. ``block_lambdas`` keeps the block labeling
    (λ1, λ2 odd; λ3, λ4 even, larger first), and ``roots`` are the matching
    non-negative square roots. The ``*_pm`` pairs are (plus, minus).
    """

    lambdas: npt.NDArray[np.float64]
    block_lambdas: npt.NDArray[np.float64]
    roots: npt.NDArray[np.float64]
    theta_pm: tuple[float, float]
    xi_pm: tuple[float, float]
    sigma_pm: tuple[float, float]


def _blocks(el: RhoElements) -> tuple[tuple[float, float, float], tuple[float, float, float]]:
    plus = (el.rho11 + el.rho14, el.rho12 + el.rho13, el.rho22 + el.rho23)
    minus = (el.rho11 - el.rho14, el.rho12 - el.rho13, el.rho22 - el.rho23)
    return plus, minus


def block_sigma(el: RhoElements) -> tuple[float, float]:
    """Σ± = 2(ρ12 ± ρ13)(∓ρ11 − ρ14 + ρ23 ± ρ22)."""
    a, b, c, d, e, f = el
    return (
        2.0 * (b + c) * (-a - d + f + e),
        2.0 * (b - c) * (a - d + f - e),
    )


def printed_sigma(el: RhoElements) -> tuple[float, float]:
    """Σ± with (ρ13 ± ρ14) as first factor, as it is commonly printed.

    It does not reproduce the R spectrum; ``validate`` reports how far off it is.
    """
    a, _, c, d, e, f = el
    return (
        2.0 * (c + d) * (-a - d + f + e),
        2.0 * (c - d) * (a - d + f - e),
    )


def _block_eigenvalues(p: float, q: float, r: float) -> tuple[float, float, float, float]:
    """(λ_big, λ_small, √λ_big, √λ_small) of one R block."""
    theta = p * p - 2.0 * q * q + r * r
    # Ξ² − Σ² = (p − r)² (p + r − 2q)(p + r + 2q); the factors are each ≥ 0 for a state.
    g = max(p + r - 2.0 * q, 0.0) * max(p + r + 2.0 * q, 0.0)
    lam_big = max(0.5 * theta + 0.5 * abs(p - r) * math.sqrt(g), 0.0)
    root_big = math.sqrt(lam_big)
    det = p * r - q * q
    if root_big == 0.0:
        return 0.0, 0.0, 0.0, 0.0
    root_small = abs(det) / root_big
    return lam_big, root_small * root_small, root_big, root_small


def r_spectrum_analytic(s: ThermalState) -> RSpectrum:
    """R eigenvalues from the six thermal elements.

    Raises:
        ConsistencyError: Ξ² − Σ² < −1e-9 for either block.
    """
    el = s.elements
    (pp, qp, rp), (pm, qm, rm) = _blocks(el)
    sigma_plus, sigma_minus = block_sigma(el)
    xi_plus, xi_minus = pp * pp - rp * rp, pm * pm - rm * rm
    theta_plus = pp * pp - 2.0 * qp * qp + rp * rp
    theta_minus = pm * pm - 2.0 * qm * qm + rm * rm

    for label, xi, sigma in (("+", xi_plus, sigma_plus), ("-", xi_minus, sigma_minus)):
        disc = xi * xi - sigma * sigma
        if disc < -CLAMP_TOL:
            raise ConsistencyError(
                f"Negative R discriminant {disc:.3e} in the {label} block for {s.params!r} "
                f"at T={s.temp.t}"
            )

    l1, l2, r1, r2 = _block_eigenvalues(pm, qm, rm)
    l3, l4, r3, r4 = _block_eigenvalues(pp, qp, rp)
    block_lambdas = np.array([l1, l2, l3, l4])
    return RSpectrum(
        lambdas=np.sort(block_lambdas)[::-1],
        block_lambdas=block_lambdas,
        roots=np.array([r1, r2, r3, r4]),
        theta_pm=(theta_plus, theta_minus),
        xi_pm=(xi_plus, xi_minus),
        sigma_pm=(sigma_plus, sigma_minus),
    )


def printed_sigma_lambdas(s: ThermalState) -> npt.NDArray[np.float64]:
    """λ1..λ4 with the printed Σ± substituted; negative discriminants clamp to 0."""
    el = s.elements
    (pp, qp, rp), (pm, qm, rm) = _blocks(el)
    sigma_plus, sigma_minus = printed_sigma(el)
    out = []
    for p, q, r, sigma in ((pm, qm, rm, sigma_minus), (pp, qp, rp, sigma_plus)):
        theta = p * p - 2.0 * q * q + r * r
        xi = p * p - r * r
        root = math.sqrt(max(xi * xi - sigma * sigma, 0.0))
        out.extend([0.5 * theta + 0.5 * root, 0.5 * theta - 0.5 * root])
    return np.array(out)


def wootters(roots: npt.ArrayLike) -> float:
    """max{0, r1 − r2 − r3 − r4} over the roots sorted descending."""
    r = np.sort(np.asarray(roots, dtype=np.float64))[::-1]
    return max(0.0, float(r[0] - r[1] - r[2] - r[3]))


def concurrence_analytic(s: ThermalState) -> float:
    return wootters(r_spectrum_analytic(s).roots)


def concurrence_printed_form(s: ThermalState) -> float:
    """max{0, |√λ1 − √λ3| − √λ2 − √λ4} with the block labeling of λ."""
    r1, r2, r3, r4 = r_spectrum_analytic(s).roots
    return max(0.0, float(abs(r1 - r3) - r2 - r4))


def r_roots_numeric(s: ThermalState) -> npt.NDArray[np.float64]:
    """√λ of R, descending, from the spectrum of √ρ (σy⊗σy) √ρ.

    R = ρ ρ̃ is similar to (√ρ Y √ρ)², so its eigenvalues are the squares of the
    eigenvalues of that symmetric matrix.

    Raises:
        ConsistencyError: ρ has an eigenvalue below −1e-9.
    """
    dec = jacobi_eigensolve(s.rho)
    if dec.values[0] < -CLAMP_TOL:
        raise ConsistencyError(
            f"Thermal state has eigenvalue {dec.values[0]:.3e} for {s.params!r} at T={s.temp.t}"
        )
    sqrt_rho = (dec.vectors * np.sqrt(np.clip(dec.values, 0.0, None))) @ dec.vectors.T
    m = sqrt_rho @ SIGMA_Y_SIGMA_Y @ sqrt_rho
    mu = jacobi_eigensolve(0.5 * (m + m.T)).values
    return np.sort(np.abs(mu))[::-1]


def r_eigenvalues_numeric(s: ThermalState) -> npt.NDArray[np.float64]:
    return r_roots_numeric(s) ** 2


def concurrence_numeric(s: ThermalState) -> float:
    return wootters(r_roots_numeric(s))


def pure_state_concurrence(psi: npt.ArrayLike) -> float:
    """2|ψ_LL ψ_RR − ψ_LR ψ_RL| for a normalized real two-qubit vector."""
    v = np.asarray(psi, dtype=np.float64)
    if v.shape != (4,):
        raise InvalidParameterError(f"Expected a 4-component state, got shape {v.shape}")
    return 2.0 * abs(float(v[0] * v[3] - v[1] * v[2]))


def reduced_a(s: ThermalState) -> Mat2:
    """State of DQD 1 (DQD 2 traced out)."""
    el = s.elements
    diag = el.rho11 + el.rho22
    return mat2([[diag, 2.0 * el.rho13], [2.0 * el.rho13, diag]])


def reduced_b(s: ThermalState) -> Mat2:
    """State of DQD 2 (DQD 1 traced out)."""
    el = s.elements
    diag = el.rho11 + el.rho22
    return mat2([[diag, 2.0 * el.rho12], [2.0 * el.rho12, diag]])


def _check_theta(theta: float) -> None:
    if not (0.0 <= theta <= THETA_MAX):
        raise InvalidParameterError(f"theta must lie in [0, pi/2], got {theta}")


def local_unitary(theta: float, phi: float = 0.0) -> Mat2:
    """U(θ, φ=0) = [[cos θ, −sin θ], [sin θ, cos θ]].

    Raises:
        UnsupportedParameterError: φ ≠ 0; only real rotations are implemented.
        InvalidParameterError: θ outside [0, π/2].
    """
    if phi != 0.0:
        raise UnsupportedParameterError(
            f"Only phi = 0 is supported (real rotations of a real state), got phi={phi}"
        )
    _check_theta(theta)
    c, s = math.cos(theta), math.sin(theta)
    return mat2([[c, -s], [s, c]])


def l1_coherence(m: npt.ArrayLike) -> float:
    """Sum of |m_ij| over i ≠ j."""
    a = np.asarray(m, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidParameterError(f"Expected a square matrix, got shape {a.shape}")
    off = ~np.eye(a.shape[0], dtype=bool)
    return float(np.sum(np.abs(a[off])))


@dataclass(frozen=True)
class MeasureSet:
    """All measures of one thermal state in the local basis rotated by θ."""

    concurrence: float
    c_l1_total: float
    c_l1_local: float
    c_l1_a: float
    c_l1_b: float
    c_cc: float
    theta: float
    phi: float = 0.0

    def as_dict(self) -> dict[str, float]:
        return asdict(self)


def rotated_state(s: ThermalState, theta: float) -> Mat4:
    """(U(θ) ⊗ U(θ)) ρ (U(θ) ⊗ U(θ))ᵀ."""
    u = local_unitary(theta)
    return conjugate(kron2(u, u), s.rho)


def correlated_coherence(s: ThermalState, theta: float = INCOHERENT_THETA) -> MeasureSet:
    u = local_unitary(theta)
    total = l1_coherence(conjugate(kron2(u, u), s.rho))
    c_a = l1_coherence(conjugate(u, reduced_a(s)))
    c_b = l1_coherence(conjugate(u, reduced_b(s)))
    local = c_a + c_b
    return MeasureSet(
        concurrence=concurrence_analytic(s),
        c_l1_total=total,
        c_l1_local=local,
        c_l1_a=c_a,
        c_l1_b=c_b,
        c_cc=total - local,
        theta=theta,
    )


def correlated_coherence_closed_form(s: ThermalState) -> float:
    """C_cc at θ = π/4: |ρ11 + ρ14 − ρ22 − ρ23| + |ρ11 − ρ14 − ρ22 + ρ23|."""
    el = s.elements
    return abs(el.rho11 + el.rho14 - el.rho22 - el.rho23) + abs(
        el.rho11 - el.rho14 - el.rho22 + el.rho23
    )
