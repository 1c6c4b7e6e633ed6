"""Real-block linear algebra in the momentum-position convention.

A real linear operator on C^n is stored as the 2n x 2n real matrix acting on
(x, y) where z = x + iy, i.e. blocks [[S11, S12], [S21, S22]] with
S(x + iy) = S11 x + S12 y + i(S21 x + S22 y).  Multiplication by -i is the
involution J0 = [[0, I], [-I, 0]].
"""

from typing import NamedTuple, Tuple

import numpy as np
from scipy import linalg

from .exceptions import (
    InvalidDimensionError,
    InvalidInputError,
    NotPositiveDefiniteError,
    NumericalDegeneracyError,
)

SYMMETRIC_TOL = 1e-10
PD_TOL = 1e-10
RECONSTRUCTION_TOL = 1e-9
SYMPLECTIC_TOL = 1e-9
PAIRING_TOL = 1e-8


class WilliamsonDecomposition(NamedTuple):
    """S0 = L^T diag(d, d) L with L symplectic and d sorted descending."""

    L: np.ndarray
    d: np.ndarray

    @property
    def n(self) -> int:
        return len(self.d)

    def normal_form(self) -> np.ndarray:
        return np.diag(np.concatenate([self.d, self.d]))

    def reconstruct(self) -> np.ndarray:
        return self.L.T @ self.normal_form() @ self.L


def as_block(matrix, name: str = "matrix") -> np.ndarray:
    """Coerce ``matrix`` to a finite real 2n x 2n array (n may be 0)."""
    arr = np.asarray(matrix, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise InvalidInputError(f"{name} must be square, got shape {arr.shape}")
    if arr.shape[0] % 2:
        raise InvalidInputError(f"{name} must have even size 2n, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} contains NaN or Inf entries")
    return arr


def _scale(S: np.ndarray) -> float:
    return max(1.0, float(np.linalg.norm(S, 2))) if S.size else 1.0


def _require_symmetric(S: np.ndarray, tol: float = SYMMETRIC_TOL) -> None:
    if S.size and np.abs(S - S.T).max() > tol * _scale(S):
        raise InvalidInputError("matrix is not symmetric within tolerance")


def standard_involution(n: int) -> np.ndarray:
    """Return J0 = [[0, I], [-I, 0]] for ``n`` modes.

    >>> standard_involution(1)
    array([[ 0.,  1.],
           [-1.,  0.]])
    """
    if int(n) != n or n < 1:
        raise InvalidDimensionError(f"mode count must be a positive integer, got {n}")
    n = int(n)
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, eye], [-eye, zero]])


def _involution(dim: int) -> np.ndarray:
    # J0 for a possibly empty block
    n = dim // 2
    if n == 0:
        return np.zeros((0, 0))
    return standard_involution(n)


def is_symplectic(L, tol: float = SYMPLECTIC_TOL) -> bool:
    """True iff ``max |L^T J0 L - J0| <= tol``."""
    L = as_block(L, "L")
    if L.size == 0:
        return True
    J = _involution(L.shape[0])
    return bool(np.abs(L.T @ J @ L - J).max() <= tol)


def is_orthogonal(U, tol: float = SYMPLECTIC_TOL) -> bool:
    U = np.asarray(U, dtype=float)
    return bool(np.abs(U.T @ U - np.eye(U.shape[0])).max() <= tol)


def uncertainty_psd_check(S, tol: float = 1e-10) -> Tuple[bool, float]:
    """Finite-block form of the uncertainty condition S - iJ >= 0.

    Returns the verdict and the smallest eigenvalue of the Hermitian matrix
    S0 - i J0.  ``tol`` is relative to ``max(1, ||S0||_2)``.
    """
    S = as_block(S, "S")
    _require_symmetric(S)
    if S.size == 0:
        return True, float("inf")
    H = S - 1j * _involution(S.shape[0])
    min_eig = float(np.linalg.eigvalsh(H)[0])
    return bool(min_eig >= -tol * _scale(S)), min_eig


def _spd_eigh(S: np.ndarray, pd_tol: float):
    _require_symmetric(S)
    sym = 0.5 * (S + S.T)
    w, V = np.linalg.eigh(sym)
    if w.size and w[0] <= pd_tol * _scale(S):
        raise NotPositiveDefiniteError(
            f"matrix is not positive definite (min eigenvalue {w[0]:.3e})"
        )
    return w, V


def principal_sqrt(S, pd_tol: float = PD_TOL) -> np.ndarray:
    """Symmetric positive definite square root via eigendecomposition."""
    S = as_block(S, "S")
    w, V = _spd_eigh(S, pd_tol)
    R = (V * np.sqrt(w)) @ V.T
    return 0.5 * (R + R.T)


def _clusters(values: np.ndarray, tol: float):
    """Group consecutive entries of a sorted array whose gaps are <= tol."""
    groups = []
    start = 0
    for i in range(1, len(values) + 1):
        if i == len(values) or abs(values[i] - values[i - 1]) > tol:
            groups.append(np.arange(start, i))
            start = i
    return groups


def _orthonormal_pairs(X: np.ndarray, Y: np.ndarray):
    """Polar-orthonormalize [X, Y] keeping the complex structure of the pairs."""
    m = X.shape[1]
    Z = np.hstack([X, Y])
    U, _, Vt = np.linalg.svd(Z, full_matrices=False)
    Q = U @ Vt
    return Q[:, :m], Q[:, m:]


def williamson(S, pd_tol: float = PD_TOL, pairing_tol: float = PAIRING_TOL) -> WilliamsonDecomposition:
    """Williamson normal form S0 = L^T diag(d, d) L.

    The skew-symmetric B = S^{1/2} J0 S^{1/2} is brought to block form with
    an orthogonal Gamma built from eigenvectors of the Hermitian matrix iB,
    whose eigenvalues are +/- d_j.  Then L = diag(d^{-1/2}, d^{-1/2}) Gamma^T S^{1/2}.
    Symplectic eigenvalues within ``pairing_tol * ||S||`` of each other are
    treated as one degenerate cluster and share a single value.
    """
    S = as_block(S, "S")
    dim = S.shape[0]
    n = dim // 2
    if n == 0:
        return WilliamsonDecomposition(np.zeros((0, 0)), np.zeros(0))
    R = principal_sqrt(S, pd_tol)
    B = R @ _involution(dim) @ R
    B = 0.5 * (B - B.T)
    evals, evecs = np.linalg.eigh(1j * B)
    tol = pairing_tol * _scale(S)
    pos = evals[n:][::-1]
    neg = -evals[:n]
    if np.any(pos <= 0) or np.abs(pos - neg).max() > tol:
        raise NumericalDegeneracyError("eigenvalues of iB do not pair as +/- d_j")
    V = evecs[:, n:][:, ::-1]
    d = pos.copy()
    # For iB v = d v with v = a - i b the real pair satisfies B a = -d b, B b = d a,
    # which makes Gamma^T B Gamma = [[0, D], [-D, 0]] and L symplectic.
    X = np.sqrt(2.0) * V.real
    Y = -np.sqrt(2.0) * V.imag
    for idx in _clusters(d, tol):
        d[idx] = d[idx].mean()
        X[:, idx], Y[:, idx] = _orthonormal_pairs(X[:, idx], Y[:, idx])
    Gamma = np.hstack([X, Y])
    scale = np.concatenate([d, d]) ** -0.5
    L = (scale[:, None] * Gamma.T) @ R
    return WilliamsonDecomposition(L, d)


def symplectic_spectrum(S, pd_tol: float = PD_TOL) -> np.ndarray:
    """Symplectic eigenvalues as moduli of the eigenvalues of i J0 S0.

    Computed from the non-Hermitian product directly so that it is an
    independent route to ``williamson(S).d``.
    """
    S = as_block(S, "S")
    n = S.shape[0] // 2
    if n == 0:
        return np.zeros(0)
    _spd_eigh(S, pd_tol)
    mods = np.sort(np.abs(linalg.eigvals(1j * _involution(2 * n) @ S)))[::-1]
    return 0.5 * (mods[0::2] + mods[1::2])


def decompose_symplectic(L, tol: float = SYMPLECTIC_TOL) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Factor a symplectic L as U diag(a, 1/a) V with U, V orthogonal-symplectic.

    Polar decomposition L = Q H gives an orthogonal-symplectic Q and a
    positive symplectic H.  Eigenvectors of H with eigenvalue a > 1 span an
    isotropic subspace; their J-images carry 1/a.  The eigenvalue-1 subspace
    is J-invariant and is split with the eigenvectors of iJ restricted to it.
    """
    L = as_block(L, "L")
    if not is_symplectic(L, tol):
        raise InvalidInputError("L is not symplectic")
    dim = L.shape[0]
    n = dim // 2
    if n == 0:
        empty = np.zeros((0, 0))
        return empty, np.zeros(0), empty
    J = _involution(dim)
    Q, H = linalg.polar(L)
    H = 0.5 * (H + H.T)
    w, E = np.linalg.eigh(H)
    order = np.argsort(w)[::-1]
    w, E = w[order], E[:, order]
    split_tol = 1e-7
    big = w > 1.0 + split_tol
    count = int(big.sum())
    if count > n:
        raise NumericalDegeneracyError("positive factor has too many eigenvalues above 1")
    X_big = E[:, big]
    a_big = w[big]
    unit = np.abs(w - 1.0) <= split_tol
    E1 = E[:, unit]
    m = n - count
    if E1.shape[1] != 2 * m:
        raise NumericalDegeneracyError("eigenvalue-1 subspace has the wrong dimension")
    if m == n:
        X_unit = np.eye(dim)[:, :n]
    elif m:
        M = E1.T @ (1j * J) @ E1
        mw, mv = np.linalg.eigh(0.5 * (M + M.conj().T))
        v = E1 @ mv[:, m:]
        X_unit = np.sqrt(2.0) * v.real
        X_unit, _ = _orthonormal_pairs(X_unit, J @ X_unit)
    else:
        X_unit = np.zeros((dim, 0))
    X = np.hstack([X_big, X_unit])
    a = np.concatenate([a_big, np.ones(m)])
    W = np.hstack([X, -J @ X])
    V = W.T
    U = Q @ W
    return U, a, V


def t_form(a) -> np.ndarray:
    """The block operator diag(a, 1/a) realizing u + iv -> a u + i v / a."""
    a = np.asarray(a, dtype=float)
    return np.diag(np.concatenate([a, 1.0 / a]))


def shale_defect(L) -> float:
    """Frobenius norm of L^T L - I."""
    L = as_block(L, "L")
    return float(np.linalg.norm(L.T @ L - np.eye(L.shape[0]), "fro"))


def complex_to_block(U) -> np.ndarray:
    """Real block form [[Re U, -Im U], [Im U, Re U]] of a complex matrix.

    The result has the unitary-type shape [[U1, U2], [-U2, U1]] with
    U = U1 - i U2.
    """
    U = np.asarray(U, dtype=complex)
    U1, U2 = U.real, -U.imag
    return np.block([[U1, U2], [-U2, U1]])


def block_to_complex(U0) -> np.ndarray:
    """Inverse of :func:`complex_to_block` for complex-linear block operators."""
    U0 = as_block(U0, "U0")
    n = U0.shape[0] // 2
    return U0[:n, :n] - 1j * U0[:n, n:]
