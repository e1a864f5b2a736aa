from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from socvexify._config import get_tolerances
from socvexify._errors import SocvexifyError


@dataclass(frozen=True, eq=False)
class QrFactors:
    """Column-pivoted QR: A[:, perm] = Q @ R, with the numerical rank of A."""

    Q: np.ndarray
    R: np.ndarray
    rank: int
    perm: np.ndarray


@dataclass(frozen=True, eq=False)
class ColumnCompression:
    """B = B_hat @ basis_map, where B_hat holds rank(B) independent columns of B."""

    B_hat: np.ndarray
    basis_map: np.ndarray
    columns: tuple[int, ...]

    @property
    def rank(self) -> int:
        return self.B_hat.shape[1]


def cholesky(M, pivot_tol: float | None = None) -> np.ndarray:
    """Lower-triangular L with L @ L.T = M for a symmetric positive definite M.

    Fails with NotPositiveDefinite when a pivot L[i, i]^2 is not above
    pivot_tol * max(diag(M))."""
    M = np.atleast_2d(np.array(M, dtype=float))
    pivot_tol = get_tolerances().pivot if pivot_tol is None else pivot_tol
    if M.shape[0] != M.shape[1]:
        raise LinalgError(f"Cholesky needs a square matrix, got {M.shape}.")
    if M.size == 0:
        return M.copy()
    scale = max(np.abs(M).max(), 1e-300)
    if np.abs(M - M.T).max() > 1e-10 * scale:
        raise LinalgError("Cholesky needs a symmetric matrix.")
    M = (M + M.T) / 2
    max_diagonal = np.diag(M).max()
    if max_diagonal <= 0:
        raise NotPositiveDefinite("Matrix has no positive diagonal entry.")
    try:
        L = scipy.linalg.cholesky(M, lower=True)
    except np.linalg.LinAlgError as e:
        raise NotPositiveDefinite(f"Cholesky factorization failed. {e}")
    pivots = np.diag(L) ** 2
    if pivots.min() <= pivot_tol * max_diagonal:
        raise NotPositiveDefinite(
            f"Smallest Cholesky pivot {pivots.min():.3e} is below "
            f"{pivot_tol:g} * {max_diagonal:.3e}."
        )
    return L


def is_positive_definite(M, pivot_tol: float | None = None) -> bool:
    try:
        cholesky(M, pivot_tol=pivot_tol)
    except NotPositiveDefinite:
        return False
    return True


def qr_factorize(A) -> QrFactors:
    """Economic column-pivoted QR with a rank-revealing threshold on diag(R)."""
    A = np.atleast_2d(np.array(A, dtype=float))
    rows, cols = A.shape
    if rows == 0 or cols == 0:
        return QrFactors(
            Q=np.zeros((rows, 0)), R=np.zeros((0, cols)), rank=0, perm=np.arange(cols)
        )
    Q, R, perm = scipy.linalg.qr(A, mode="economic", pivoting=True)
    diagonal = np.abs(np.diag(R))
    rank = int(np.sum(diagonal > get_tolerances().rank * diagonal[0])) if diagonal[0] > 0 else 0
    return QrFactors(Q=Q, R=R, rank=rank, perm=perm)


def project_onto_colspace(B, V) -> tuple[np.ndarray, np.ndarray]:
    """Split V = V_bar + V_perp with the columns of V_bar in col(B) and B.T @ V_perp = 0."""
    B = np.atleast_2d(np.array(B, dtype=float))
    V = np.array(V, dtype=float)
    vector = V.ndim == 1
    if vector:
        V = V.reshape(-1, 1)
    factors = qr_factorize(B)
    basis = factors.Q[:, : factors.rank]
    V_bar = basis @ (basis.T @ V)
    V_perp = V - V_bar
    if vector:
        return V_bar.ravel(), V_perp.ravel()
    return V_bar, V_perp


def column_compress(B) -> ColumnCompression:
    """Keep rank(B) independent columns of B (chosen by pivoted QR, in original order).

    The basis map T solves B_hat @ T = B, so B y = B_hat (T y) for every y."""
    B = np.atleast_2d(np.array(B, dtype=float))
    factors = qr_factorize(B)
    columns = tuple(sorted(int(c) for c in factors.perm[: factors.rank]))
    B_hat = B[:, list(columns)]
    if factors.rank == 0:
        return ColumnCompression(
            B_hat=B_hat, basis_map=np.zeros((0, B.shape[1])), columns=columns
        )
    basis_map = np.linalg.lstsq(B_hat, B, rcond=None)[0]
    return ColumnCompression(B_hat=B_hat, basis_map=basis_map, columns=columns)


def random_orthogonal(n: int, rng: np.random.Generator) -> np.ndarray:
    """Orthogonal matrix from the eigendecomposition of the random matrix G + G' + n I."""
    if n < 1:
        raise LinalgError(f"Matrix order has to be positive, got {n}.")
    G = rng.standard_normal((n, n))
    _, U = np.linalg.eigh(G + G.T + n * np.eye(n))
    return U


def psd_factor(M, tol: float = 1e-12) -> np.ndarray:
    """Tall factor F with F @ F.T = M for a symmetric PSD M (eigenvalues below tol dropped).

    Raises NotPositiveDefinite when M has an eigenvalue below -tol * scale."""
    M = np.atleast_2d(np.array(M, dtype=float))
    if M.size == 0:
        return np.zeros((M.shape[0], 0))
    M = (M + M.T) / 2
    eigenvalues, eigenvectors = np.linalg.eigh(M)
    scale = max(np.abs(eigenvalues).max(), 1.0)
    if eigenvalues.min() < -tol * scale * 1e3:
        raise NotPositiveDefinite(
            f"Matrix is not positive semidefinite, smallest eigenvalue {eigenvalues.min():.3e}."
        )
    keep = eigenvalues > tol * scale
    return eigenvectors[:, keep] * np.sqrt(eigenvalues[keep])


class LinalgError(SocvexifyError):
    """Custom error for the dense linear algebra kernels."""

    pass


class NotPositiveDefinite(LinalgError):
    """Custom error for a failed Cholesky pivot, i.e. a matrix that is not positive definite."""

    pass
