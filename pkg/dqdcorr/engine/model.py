"""Two capacitively coupled double quantum dots.

H = Δ1 (σx ⊗ I) + Δ2 (I ⊗ σx) + V (σz ⊗ σz), in the basis
(|LL⟩, |LR⟩, |RL⟩, |RR⟩) indexed 0..3, with ħ = k_B = 1.

The spectrum is available in closed form (``analytic_spectrum``) and from the
Jacobi eigensolver (``numeric_spectrum``). Both use the same labeling:

    ε1 = +√(n−² + V²)   |φ1⟩ = α−[A−(−|LL⟩ + |RR⟩) + n−(|LR⟩ − |RL⟩)]
    ε2 = −√(n−² + V²)   |φ2⟩ = α−[n−(−|LL⟩ + |RR⟩) + A−(−|LR⟩ + |RL⟩)]
    ε3 = +√(n+² + V²)   |φ3⟩ = α+[A+(|LL⟩ + |RR⟩) + n+(|LR⟩ + |RL⟩)]
    ε4 = −√(n+² + V²)   |φ4⟩ = α+[n+(|LL⟩ + |RR⟩) − A+(|LR⟩ + |RL⟩)]

with n± = Δ1 ± Δ2, A± = V + √(n±² + V²), α± = 1 / (√2 √(n±² + A±²)).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict

from .errors import ConsistencyError
from .numkernel import IDENTITY2, SIGMA_X, SIGMA_Z, Mat4, jacobi_eigensolve, kron2

logger = logging.getLogger(__name__)

BASIS_LABELS = ("LL", "LR", "RL", "RR")

# Global flip |ij⟩ -> |ī j̄⟩; commutes with H. Plus branch is even, minus branch odd.
PARITY: Mat4 = kron2(SIGMA_X, SIGMA_X)
PARITY.setflags(write=False)

DEGENERACY_TOL = 1e-12


class ModelParams(BaseModel):
    """Couplings of the model in dimensionless energy units."""

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    delta1: float  # Δ1, tunneling of DQD 1
    delta2: float  # Δ2, tunneling of DQD 2
    v: float  # V, Coulomb coupling

    def swapped(self) -> ModelParams:
        """Same model with Δ1 and Δ2 exchanged."""
        return ModelParams(delta1=self.delta2, delta2=self.delta1, v=self.v)


@dataclass(frozen=True)
class DerivedCouplings:
    """n±, A± and the normalizers α± of the closed-form eigenvectors.

    α± is ``math.inf`` when n± = 0 and A± = 0 (V ≤ 0), where the closed form
    has no normalizable vector.
    """

    n_minus: float
    n_plus: float
    a_minus: float
    a_plus: float
    alpha_minus: float
    alpha_plus: float

    @property
    def minus_finite(self) -> bool:
        return math.isfinite(self.alpha_minus)

    @property
    def plus_finite(self) -> bool:
        return math.isfinite(self.alpha_plus)

    @property
    def finite(self) -> bool:
        return self.minus_finite and self.plus_finite


def _a_coefficient(n: float, v: float) -> float:
    root = math.hypot(n, v)
    if v >= 0:
        return v + root
    # V + √(n² + V²) cancels for V < 0; n² / (√(n² + V²) − V) is the same number.
    if n == 0:
        return 0.0
    return n * n / (root - v)


def _alpha(n: float, a: float) -> float:
    norm = math.hypot(n, a)
    if norm == 0.0:
        return math.inf
    return 1.0 / (math.sqrt(2.0) * norm)


def derive_couplings(p: ModelParams) -> DerivedCouplings:
    n_minus = p.delta1 - p.delta2
    n_plus = p.delta1 + p.delta2
    a_minus = _a_coefficient(n_minus, p.v)
    a_plus = _a_coefficient(n_plus, p.v)
    return DerivedCouplings(
        n_minus=n_minus,
        n_plus=n_plus,
        a_minus=a_minus,
        a_plus=a_plus,
        alpha_minus=_alpha(n_minus, a_minus),
        alpha_plus=_alpha(n_plus, a_plus),
    )


def analytic_energies(p: ModelParams) -> npt.NDArray[np.float64]:
    """(ε1, ε2, ε3, ε4); defined for every parameter set."""
    r_minus = math.hypot(p.delta1 - p.delta2, p.v)
    r_plus = math.hypot(p.delta1 + p.delta2, p.v)
    return np.array([r_minus, -r_minus, r_plus, -r_plus])


@dataclass(frozen=True)
class Spectrum:
    """Eigen-energies (ε1..ε4) and eigenvectors; ``states[i]`` is |φ_{i+1}⟩."""

    energies: npt.NDArray[np.float64]
    states: npt.NDArray[np.float64]
    source: Literal["analytic", "numeric"]

    @property
    def ground_state(self) -> npt.NDArray[np.float64]:
        """Eigenvector of the lowest energy (|φ4⟩ for V ≥ 0 and Δ1·Δ2 ≥ 0)."""
        return self.states[int(np.argmin(self.energies))]

    @property
    def ground_energy(self) -> float:
        return float(np.min(self.energies))


def build_hamiltonian(p: ModelParams) -> Mat4:
    """Δ1 (σx ⊗ I) + Δ2 (I ⊗ σx) + V (σz ⊗ σz)."""
    return (
        p.delta1 * kron2(SIGMA_X, IDENTITY2)
        + p.delta2 * kron2(IDENTITY2, SIGMA_X)
        + p.v * kron2(SIGMA_Z, SIGMA_Z)
    )


def _closed_form_states(d: DerivedCouplings) -> npt.NDArray[np.float64]:
    # Amplitudes on (LL, LR, RL, RR), already multiplied by α±.
    nm, am = d.alpha_minus * d.n_minus, d.alpha_minus * d.a_minus
    npl, apl = d.alpha_plus * d.n_plus, d.alpha_plus * d.a_plus
    return np.array(
        [
            [-am, nm, -nm, am],
            [-nm, -am, am, nm],
            [apl, npl, npl, apl],
            [npl, -apl, -apl, npl],
        ]
    )


def analytic_spectrum(p: ModelParams) -> Spectrum:
    """Closed-form spectrum; falls back to ``numeric_spectrum`` if α± is undefined."""
    d = derive_couplings(p)
    if not d.finite:
        logger.warning(
            f"Closed-form normalizer undefined for {p!r} "
            f"(alpha-={d.alpha_minus}, alpha+={d.alpha_plus}); using numeric spectrum"
        )
        return numeric_spectrum(p)

    states = _closed_form_states(d)
    states.setflags(write=False)
    energies = analytic_energies(p)
    energies.setflags(write=False)
    return Spectrum(energies=energies, states=states, source="analytic")


def _cluster(values: npt.NDArray[np.float64], tol: float) -> list[list[int]]:
    clusters: list[list[int]] = []
    for i, value in enumerate(values):
        if clusters and value - values[clusters[-1][0]] <= tol:
            clusters[-1].append(i)
        else:
            clusters.append([i])
    return clusters


def numeric_spectrum(p: ModelParams) -> Spectrum:
    """Spectrum from the Jacobi eigensolver, relabeled to the ε1..ε4 convention.

    Each (possibly degenerate) eigenspace is split into its parity-even and
    parity-odd parts. Within a parity sector the higher energy gets the "+"
    label (ε1 odd, ε3 even) and the lower one the "−" label (ε2, ε4).
    """
    h = build_hamiltonian(p)
    dec = jacobi_eigensolve(h)
    tol = DEGENERACY_TOL * max(1.0, float(np.max(np.abs(dec.values))))

    even: list[npt.NDArray[np.float64]] = []
    odd: list[npt.NDArray[np.float64]] = []
    for idx in _cluster(dec.values, tol):
        block = dec.vectors[:, idx]
        candidates = []
        for sector, sign in (("even", 1.0), ("odd", -1.0)):
            projected = 0.5 * (block + sign * (PARITY @ block))
            u, s, _ = np.linalg.svd(projected, full_matrices=False)
            candidates.extend((float(s[j]), sector, u[:, j]) for j in range(len(s)))
        candidates.sort(key=lambda c: c[0], reverse=True)
        for _, sector, vec in candidates[: len(idx)]:
            (even if sector == "even" else odd).append(vec / np.linalg.norm(vec))

    if len(even) != 2 or len(odd) != 2:
        raise ConsistencyError(
            f"Parity split of the spectrum failed for {p!r}: {len(even)} even, {len(odd)} odd"
        )

    def by_energy(vectors: list[npt.NDArray[np.float64]]):
        pairs = [(float(v @ h @ v), v) for v in vectors]
        return sorted(pairs, key=lambda pair: pair[0])

    (e2, v2), (e1, v1) = by_energy(odd)
    (e4, v4), (e3, v3) = by_energy(even)
    states = np.array([v1, v2, v3, v4])

    d = derive_couplings(p)
    if d.finite:
        reference = _closed_form_states(d)
        for i in range(4):
            if float(states[i] @ reference[i]) < 0:
                states[i] = -states[i]

    energies = np.array([e1, e2, e3, e4])
    states.setflags(write=False)
    energies.setflags(write=False)
    return Spectrum(energies=energies, states=states, source="numeric")


def eigen_residual(p: ModelParams, spectrum: Spectrum) -> float:
    """max_i |H φi − εi φi|∞."""
    h = build_hamiltonian(p)
    return max(
        float(np.max(np.abs(h @ spectrum.states[i] - spectrum.energies[i] * spectrum.states[i])))
        for i in range(4)
    )
