"""Small dense matrix toolkit (2x2 and 4x4, real).

All matrices are ``numpy.ndarray`` of ``float64``. The Hamiltonian, the thermal
state and every rotation used by the engine are real.

The eigensolver is a cyclic Jacobi method. It is used as the independent
numerical oracle for the closed-form spectrum and Gibbs state.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Iterable, Literal

import numpy as np
import numpy.typing as npt

from .errors import (
    ConvergenceError,
    InvalidParameterError,
    NonSymmetricMatrixError,
    UnsupportedParameterError,
)

logger = logging.getLogger(__name__)

Mat2 = npt.NDArray[np.float64]
Mat4 = npt.NDArray[np.float64]

JACOBI_TOL = 1e-13
JACOBI_MAX_SWEEPS = 100
ORTHOGONALITY_TOL = 1e-12

IDENTITY2: Mat2 = np.eye(2)
SIGMA_X: Mat2 = np.array([[0.0, 1.0], [1.0, 0.0]])
SIGMA_Z: Mat2 = np.array([[1.0, 0.0], [0.0, -1.0]])
# sigma_y is imaginary; only sigma_y (x) sigma_y enters the engine and it is real.
SIGMA_Y_SIGMA_Y: Mat4 = np.array(
    [
        [0.0, 0.0, 0.0, -1.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0, 0.0],
    ]
)

for _m in (IDENTITY2, SIGMA_X, SIGMA_Z, SIGMA_Y_SIGMA_Y):
    _m.setflags(write=False)


def _from_values(values: Iterable[float] | npt.ArrayLike, n: int) -> npt.NDArray[np.float64]:
    arr = np.array(values, dtype=np.float64)
    if arr.size != n * n:
        raise InvalidParameterError(f"Expected {n * n} values for a {n}x{n} matrix, got {arr.size}")
    return arr.reshape(n, n)


def mat4(values: Iterable[float] | npt.ArrayLike) -> Mat4:
    """Build a 4x4 matrix from 16 values (row-major) or a nested 4x4 sequence."""
    return _from_values(values, 4)


def mat2(values: Iterable[float] | npt.ArrayLike) -> Mat2:
    """Build a 2x2 matrix from 4 values (row-major) or a nested 2x2 sequence."""
    return _from_values(values, 2)


@dataclass(frozen=True)
class EigenDecomp:
    """Eigenvalues in ascending order with matching orthonormal eigenvectors.

    ``vectors[:, k]`` is the eigenvector of ``values[k]``.
    """

    values: npt.NDArray[np.float64]
    vectors: npt.NDArray[np.float64]
    sweeps: int = 0

    def reconstruct(self) -> npt.NDArray[np.float64]:
        """Return sum_k values[k] * v_k v_k^T."""
        return (self.vectors * self.values) @ self.vectors.T


def off_diagonal_norm(a: npt.NDArray[np.float64]) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.sqrt(np.sum(off * off)))


def _rotate(a: npt.NDArray[np.float64], v: npt.NDArray[np.float64], k: int, l: int) -> None:
    """Apply one Jacobi rotation in place so that a[k, l] becomes zero."""
    akl = a[k, l]
    diff = a[l, l] - a[k, k]
    if abs(2.0 * akl) < abs(diff) * 1e-150:
        # |theta| > 1e150; t = 1 / (2 theta) without forming theta.
        t = akl / diff
    else:
        theta = diff / (2.0 * akl)
        t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
    c = 1.0 / math.sqrt(t * t + 1.0)
    s = t * c

    col_k = a[:, k].copy()
    col_l = a[:, l].copy()
    a[:, k] = c * col_k - s * col_l
    a[:, l] = s * col_k + c * col_l

    row_k = a[k, :].copy()
    row_l = a[l, :].copy()
    a[k, :] = c * row_k - s * row_l
    a[l, :] = s * row_k + c * row_l

    a[k, l] = 0.0
    a[l, k] = 0.0

    vk = v[:, k].copy()
    vl = v[:, l].copy()
    v[:, k] = c * vk - s * vl
    v[:, l] = s * vk + c * vl


def jacobi_eigensolve(m: npt.ArrayLike, tol: float = JACOBI_TOL) -> EigenDecomp:
    """Diagonalize a real symmetric matrix with the cyclic Jacobi method.

    Args:
        m: Square real symmetric matrix (the engine uses 4x4).
        tol: Convergence threshold on the off-diagonal norm, relative to the
            Frobenius norm of ``m`` (absolute when that norm is below 1). Also
            the relative symmetry tolerance.

    Returns:
        EigenDecomp with ascending eigenvalues.

    Raises:
        InvalidParameterError: tol <= 0 or m not square.
        NonSymmetricMatrixError: m is not symmetric within tol * max|m|.
        ConvergenceError: more than 100 sweeps were needed.
    """
    if tol <= 0:
        raise InvalidParameterError(f"Eigensolver tolerance must be positive, got {tol}")
    a = np.array(m, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidParameterError(f"Expected a square matrix, got shape {a.shape}")

    scale_abs = float(np.max(np.abs(a))) if a.size else 0.0
    asymmetry = float(np.max(np.abs(a - a.T))) if a.size else 0.0
    if asymmetry > tol * scale_abs:
        raise NonSymmetricMatrixError(asymmetry, tol * scale_abs)
    a = 0.5 * (a + a.T)

    n = a.shape[0]
    v = np.eye(n)
    threshold = tol * max(1.0, float(np.linalg.norm(a)))

    sweeps = 0
    residual = off_diagonal_norm(a)
    while residual >= threshold:
        if sweeps >= JACOBI_MAX_SWEEPS:
            raise ConvergenceError(sweeps, residual)
        for k in range(n - 1):
            for l in range(k + 1, n):
                if a[k, l] != 0.0:
                    _rotate(a, v, k, l)
        sweeps += 1
        residual = off_diagonal_norm(a)

    logger.debug(f"Jacobi converged in {sweeps} sweeps (residual {residual:.3e})")

    values = np.diag(a).copy()
    order = np.argsort(values, kind="stable")
    return EigenDecomp(values=values[order], vectors=v[:, order], sweeps=sweeps)


def kron2(a: Mat2, b: Mat2) -> Mat4:
    """Kronecker product of two 2x2 matrices: K[2i+k, 2j+l] = a[i, j] * b[k, l]."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    out = np.empty((4, 4))
    for i in range(2):
        for j in range(2):
            out[2 * i : 2 * i + 2, 2 * j : 2 * j + 2] = a[i, j] * b
    return out


def is_orthogonal(u: npt.ArrayLike, tol: float = ORTHOGONALITY_TOL) -> bool:
    """True when u u^T equals the identity within tol (max-abs)."""
    u = np.asarray(u, dtype=np.float64)
    return bool(np.max(np.abs(u @ u.T - np.eye(u.shape[0]))) <= tol)


def conjugate(u: npt.ArrayLike, m: npt.ArrayLike) -> npt.NDArray[np.float64]:
    """Return u m u^T for a real orthogonal u (square, same size as m).

    Raises:
        UnsupportedParameterError: u is not orthogonal within 1e-12.
    """
    u = np.asarray(u, dtype=np.float64)
    m = np.asarray(m, dtype=np.float64)
    if u.shape != m.shape:
        raise InvalidParameterError(f"Shape mismatch: rotation {u.shape} vs matrix {m.shape}")
    if not is_orthogonal(u):
        raise UnsupportedParameterError("Rotation matrix is not orthogonal within 1e-12")
    return u @ m @ u.T


def partial_trace(rho: Mat4, keep: Literal["A", "B"]) -> Mat2:
    """Reduced state of a two-qubit matrix in the (A, B) tensor order.

    ``keep="A"`` traces out B; ``keep="B"`` traces out A.
    """
    t = np.asarray(rho, dtype=np.float64).reshape(2, 2, 2, 2)
    if keep == "A":
        return np.einsum("ijkj->ik", t)
    if keep == "B":
        return np.einsum("ijil->jl", t)
    raise InvalidParameterError(f"keep must be 'A' or 'B', got {keep!r}")


def determinant4(m: Mat4) -> float:
    """Determinant by cofactor expansion along the first row."""
    m = np.asarray(m, dtype=np.float64)

    def det3(s: npt.NDArray[np.float64]) -> float:
        return float(
            s[0, 0] * (s[1, 1] * s[2, 2] - s[1, 2] * s[2, 1])
            - s[0, 1] * (s[1, 0] * s[2, 2] - s[1, 2] * s[2, 0])
            + s[0, 2] * (s[1, 0] * s[2, 1] - s[1, 1] * s[2, 0])
        )

    total = 0.0
    for j in range(4):
        minor = np.delete(np.delete(m, 0, axis=0), j, axis=1)
        total += (-1) ** j * m[0, j] * det3(minor)
    return total
