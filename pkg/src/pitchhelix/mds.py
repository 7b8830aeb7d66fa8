"""Classical (Torgerson) multidimensional scaling.

Squared geodesics are double-centered into the Gram-like operator
tau = -0.5 * H @ S @ H with H = I - 1/n, which a cyclic Jacobi sweep
diagonalizes. Coordinates scale eigenvectors by sqrt(max(eigenvalue, 0)), so
embedded Euclidean distances approximate the input geodesics; negative
eigenvalues (non-Euclidean input) are clamped out of both the coordinates and
the explained-variance denominator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "Embedding",
    "double_center",
    "eig_sym",
    "embed",
]


@dataclass(frozen=True)
class Embedding:
    """MDS output: per-vertex coordinates plus the full eigenvalue spectrum."""

    coordinates: np.ndarray  # (n, dims)
    eigenvalues: np.ndarray  # (n,), descending
    explained_variance: np.ndarray  # (dims,), ratios in [0, 1]

    @property
    def n_vertices(self) -> int:
        return self.coordinates.shape[0]

    @property
    def dims(self) -> int:
        return self.coordinates.shape[1]


def _check_square_symmetric(m: np.ndarray, what: str, tol: float = 1e-10):
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{what} must be square, got shape {m.shape}")
    scale = max(1.0, float(np.max(np.abs(m))) if m.size else 1.0)
    if np.max(np.abs(m - m.T), initial=0.0) > tol * scale:
        raise ValueError(f"{what} must be symmetric")


def double_center(geodesic_matrix) -> np.ndarray:
    """tau = -0.5 * H @ D^2 @ H; rows and columns sum to ~0.

    Rejects non-finite input: infinite geodesics mean the neighbor graph is
    disconnected and must be fixed (or restricted to one component) first.
    """
    d = np.asarray(geodesic_matrix, dtype=float)
    if not np.all(np.isfinite(d)):
        raise ValueError(
            "geodesic matrix contains non-finite entries; the neighbor graph "
            "must be connected (or analysis restricted to one component) "
            "before embedding"
        )
    _check_square_symmetric(d, "geodesic matrix")
    s = d**2
    row_means = s.mean(axis=1)
    tau = -0.5 * (s - row_means[:, None] - row_means[None, :] + s.mean())
    upper = np.triu(tau, k=1)
    return upper + upper.T + np.diag(np.diag(tau))


def eig_sym(matrix, tol: float = 1e-14, max_sweeps: int = 60) -> tuple:
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvalues descending and
    eigenvectors as orthonormal columns. Each eigenvector's sign is fixed so
    its largest-magnitude entry is positive, making output reproducible.
    Sweeps stop once the off-diagonal Frobenius mass falls below
    ``tol * ||M||_F``.
    """
    m = np.asarray(matrix, dtype=float)
    _check_square_symmetric(m, "matrix")
    n = m.shape[0]
    a = m.copy()
    v = np.eye(n)
    fro = np.linalg.norm(a)
    if fro == 0.0:
        return np.zeros(n), v
    for _ in range(max_sweeps):
        off = np.sqrt(max(np.sum(a**2) - np.sum(np.diag(a) ** 2), 0.0))
        if off <= tol * fro:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if theta == 0.0:
                    t = 1.0
                else:
                    t = np.sign(theta) / (abs(theta) + np.hypot(theta, 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                col_p, col_q = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p, row_q = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, q] = a[q, p] = 0.0
                vec_p, vec_q = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vec_p - s * vec_q
                v[:, q] = s * vec_p + c * vec_q
    else:
        raise RuntimeError(f"Jacobi sweep did not converge in {max_sweeps} sweeps")
    eigenvalues = np.diag(a).copy()
    order = np.argsort(-eigenvalues, kind="stable")
    eigenvalues = eigenvalues[order]
    v = v[:, order]
    for j in range(n):
        lead = np.argmax(np.abs(v[:, j]))
        if v[lead, j] < 0:
            v[:, j] = -v[:, j]
    return eigenvalues, v


def embed(geodesic_matrix, dims: int = 3, scale_by_eigenvalue: bool = True) -> Embedding:
    """Torgerson MDS embedding of a finite geodesic matrix.

    Column m of the coordinates is sqrt(max(lambda_m, 0)) times eigenvector m
    (or the raw eigenvector when ``scale_by_eigenvalue`` is off, matching
    displays that plot unscaled eigenvectors). Deterministic for fixed input.
    """
    tau = double_center(geodesic_matrix)
    n = tau.shape[0]
    if not 1 <= dims <= n:
        raise ValueError(f"dims must satisfy 1 <= dims <= {n}, got {dims}")
    eigenvalues, eigenvectors = eig_sym(tau)
    leading = np.clip(eigenvalues[:dims], 0.0, None)
    if scale_by_eigenvalue:
        coordinates = eigenvectors[:, :dims] * np.sqrt(leading)
    else:
        coordinates = eigenvectors[:, :dims].copy()
    total = np.sum(np.clip(eigenvalues, 0.0, None))
    if total > 0:
        explained = leading / total
    else:
        explained = np.zeros(dims)
    return Embedding(coordinates, eigenvalues, explained)
