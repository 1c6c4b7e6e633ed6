"""Gaussian states rho_g(w, S) on the Fock space of infinitely many modes.

A state is stored as a complex mean vector ``w`` supported on the first n
modes, the 2n x 2n momentum-position covariance block of those modes, and a
:class:`~gaussfock.tails.TailModel` for every mode after them.  The quantum
characteristic function is

    rho^(z) = exp(-i Re<w, z> - 1/2 Re<z, S z>)

with the inner product anti-linear in its first argument.
"""

import heapq
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import tails as _tails
from .exceptions import (
    InvalidInputError,
    NoDensityMatrixError,
    NotPositiveDefiniteError,
    UnsupportedOperationError,
    ValidationError,
)
from .symplectic import (
    SYMMETRIC_TOL,
    PD_TOL,
    as_block,
    is_symplectic,
    principal_sqrt,
    standard_involution,
    symplectic_spectrum,
    uncertainty_psd_check,
    williamson,
)
from .tails import TailModel, classify_tail

PURITY_TOL = 1e-8
MEAN_ZERO_TOL = 1e-12
# d - 1 below this is rounding noise from williamson (observed <= 1e-13 on pure
# inputs); sqrt(d^2 - 1) would otherwise amplify it to ~1e-7
UNIT_SNAP_TOL = 1e-11


@dataclass(frozen=True, eq=False)
class GaussianState:
    """rho_g(w, S): complex mean, covariance block and tail model."""

    mean: np.ndarray
    cov: np.ndarray
    tail: TailModel = field(default_factory=TailModel.identity)

    def __post_init__(self):
        mean = np.atleast_1d(np.asarray(self.mean, dtype=complex))
        cov = as_block(self.cov, "covariance block")
        if mean.ndim != 1 or 2 * len(mean) != cov.shape[0]:
            raise InvalidInputError(
                f"mean of length {mean.shape} does not match covariance of shape {cov.shape}"
            )
        if not np.all(np.isfinite(mean)):
            raise InvalidInputError("mean contains NaN or Inf")
        scale = max(1.0, float(np.linalg.norm(cov, 2))) if cov.size else 1.0
        if cov.size and np.abs(cov - cov.T).max() > SYMMETRIC_TOL * scale:
            raise InvalidInputError("covariance block is not symmetric")
        cov = 0.5 * (cov + cov.T)
        if cov.size and np.linalg.eigvalsh(cov)[0] <= PD_TOL * scale:
            raise NotPositiveDefiniteError("covariance block is not positive definite")
        if not isinstance(self.tail, TailModel):
            raise InvalidInputError("tail must be a TailModel")
        mean.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def n(self) -> int:
        return len(self.mean)

    @property
    def real_mean(self) -> np.ndarray:
        """Mean in real coordinates (Re w, Im w)."""
        return np.concatenate([self.mean.real, self.mean.imag])

    def allclose(self, other: "GaussianState", atol: float = 1e-9) -> bool:
        return (
            self.n == other.n
            and self.tail == other.tail
            and np.allclose(self.mean, other.mean, rtol=0, atol=atol)
            and np.allclose(self.cov, other.cov, rtol=0, atol=atol)
        )

    def to_json(self) -> dict:
        return {
            "modes": self.n,
            "mean_re": self.mean.real.tolist(),
            "mean_im": self.mean.imag.tolist(),
            "S0": self.cov.tolist(),
            "tail": self.tail.to_json(),
        }

    @classmethod
    def from_json(cls, obj) -> "GaussianState":
        if not isinstance(obj, dict):
            raise InvalidInputError("state must be a JSON object")
        missing = {"modes", "mean_re", "mean_im", "S0"} - set(obj)
        if missing:
            raise InvalidInputError(f"state is missing fields: {sorted(missing)}")
        n = obj["modes"]
        if not isinstance(n, int) or isinstance(n, bool) or n < 0:
            raise InvalidInputError("'modes' must be a non-negative integer")
        try:
            re = np.asarray(obj["mean_re"], dtype=float).reshape(-1)
            im = np.asarray(obj["mean_im"], dtype=float).reshape(-1)
            cov = np.asarray(obj["S0"], dtype=float).reshape(2 * n, 2 * n)
        except (TypeError, ValueError) as exc:
            raise InvalidInputError(f"malformed state arrays: {exc}") from None
        if len(re) != n or len(im) != n:
            raise InvalidInputError("mean_re and mean_im must have 'modes' entries")
        tail = TailModel.from_json(obj.get("tail", {"kind": "identity"}))
        return cls(re + 1j * im, cov, tail)


@dataclass(frozen=True)
class ValidationReport:
    cond1_psd: bool
    min_eigenvalue: Optional[float]
    cond2_hs: bool
    cond3_trace: bool
    min_symplectic_eigenvalue: Optional[float]
    verdict: bool
    block_hs_norm: float = 0.0
    block_trace_norm: float = 0.0
    tail: Optional[_tails.TailClassification] = None

    def to_json(self) -> dict:
        return {
            "cond1_psd": self.cond1_psd,
            "min_eigenvalue": self.min_eigenvalue,
            "cond2_hs": self.cond2_hs,
            "cond3_trace": self.cond3_trace,
            "min_symplectic_eigenvalue": self.min_symplectic_eigenvalue,
            "verdict": self.verdict,
            "block_hs_norm": self.block_hs_norm,
            "block_trace_norm": self.block_trace_norm,
            "tail": self.tail.to_json() if self.tail else None,
        }


@dataclass(frozen=True)
class ExtremePair:
    """S = (N^T N + M^T M) / 2 with N, M symplectic (pure covariances)."""

    N: np.ndarray
    M: np.ndarray

    def midpoint(self) -> np.ndarray:
        return 0.5 * (self.N.T @ self.N + self.M.T @ self.M)


# -- constructors -------------------------------------------------------------


def vacuum(n: int) -> GaussianState:
    if int(n) != n or n < 0:
        raise InvalidInputError(f"mode count must be >= 0, got {n}")
    return GaussianState(np.zeros(int(n), complex), np.eye(2 * int(n)))


def coherent_state(f) -> GaussianState:
    """Normalized exponential vector e^{-|f|^2/2} e(f); its mean is -2if."""
    f = np.atleast_1d(np.asarray(f, dtype=complex))
    if not np.all(np.isfinite(f)):
        raise InvalidInputError("coherent amplitude contains NaN or Inf")
    return GaussianState(-2j * f, np.eye(2 * len(f)))


def thermal_state(d) -> GaussianState:
    """Product of thermal modes with symplectic eigenvalues ``d`` (each >= 1)."""
    d = np.atleast_1d(np.asarray(d, dtype=float))
    return GaussianState(np.zeros(len(d), complex), np.diag(np.concatenate([d, d])))


def pure_state(L) -> GaussianState:
    """Vacuum conjugated by the Shale unitary of L: rho_g(0, L^T L)."""
    L = as_block(L, "L")
    return shale_conjugate(vacuum(L.shape[0] // 2), L)


def from_momentum_position(l, m, cov, tail: Optional[TailModel] = None) -> GaussianState:
    l = np.asarray(l, dtype=float)
    m = np.asarray(m, dtype=float)
    return GaussianState(math.sqrt(2.0) * (l - 1j * m), cov, tail or TailModel.identity())


def mean_momentum_position(state: GaussianState) -> Tuple[np.ndarray, np.ndarray]:
    """Split w = sqrt(2)(l - i m) into mean momentum l and mean position m."""
    w = state.mean
    return w.real / math.sqrt(2.0), -w.imag / math.sqrt(2.0)


# -- characteristic function --------------------------------------------------


def characteristic_function(state: GaussianState, z):
    """Evaluate rho^(z) for one vector or a batch of row vectors.

    Entries of ``z`` past the block are tail coordinates; tail mode j
    contributes d_j |z_j|^2 to the quadratic form.
    """
    z = np.asarray(z, dtype=complex)
    single = z.ndim <= 1
    z = np.atleast_2d(z)
    if not np.all(np.isfinite(z)):
        raise InvalidInputError("z contains NaN or Inf")
    n = state.n
    width = z.shape[1]
    if width < n:
        z = np.hstack([z, np.zeros((z.shape[0], n - width), complex)])
    head, rest = z[:, :n], z[:, n:]
    zr = np.hstack([head.real, head.imag])
    quad = np.einsum("ki,ij,kj->k", zr, state.cov, zr)
    if rest.shape[1]:
        j = np.arange(1, rest.shape[1] + 1)
        d_tail = 1.0 + _tails._excess(state.tail, j)
        quad = quad + (np.abs(rest) ** 2) @ d_tail
    lin = (np.conj(state.mean)[None, :] * head).real.sum(axis=1)
    out = np.exp(-1j * lin - 0.5 * quad)
    return out[0] if single else out


# -- admissibility --------------------------------------------------------------


def validate(state: GaussianState, tol: float = 1e-10) -> ValidationReport:
    """Check the three admissibility conditions for a covariance operator.

    1. S - iJ >= 0, decided on the finite block (tail modes have d_j >= 1).
    2. S - I Hilbert-Schmidt and 3. (sqrt(S) J sqrt(S))^T (sqrt(S) J sqrt(S)) - I
       trace class, decided by the closed-form tail classification; the finite
       block always passes and its norms are reported for information.
    """
    tc = classify_tail(state.tail)
    S = state.cov
    if state.n == 0:
        cond1, min_eig, min_symp = True, None, None
        hs = tr = 0.0
    else:
        cond1, min_eig = uncertainty_psd_check(S, tol)
        min_symp = float(symplectic_spectrum(S).min())
        R = principal_sqrt(S)
        B = R @ standard_involution(state.n) @ R
        hs = float(np.linalg.norm(S - np.eye(2 * state.n), "fro"))
        tr = float(np.abs(np.linalg.eigvalsh(B.T @ B - np.eye(2 * state.n))).sum())
    cond1 = cond1 and tc.cond1_uncertainty
    return ValidationReport(
        cond1_psd=cond1,
        min_eigenvalue=min_eig,
        cond2_hs=tc.cond2_hilbert_schmidt,
        cond3_trace=tc.cond3_trace_class,
        min_symplectic_eigenvalue=min_symp,
        verdict=cond1 and tc.cond2_hilbert_schmidt and tc.cond3_trace_class,
        block_hs_norm=hs,
        block_trace_norm=tr,
        tail=tc,
    )


def _require_valid(state: GaussianState, what: str) -> ValidationReport:
    report = validate(state)
    if not report.verdict:
        raise ValidationError(f"{what} requires an admissible Gaussian state")
    return report


def _require_mean_zero(state: GaussianState, what: str) -> None:
    if np.abs(state.mean).max(initial=0.0) > MEAN_ZERO_TOL:
        raise InvalidInputError(f"{what} requires a mean-zero state (displace it first)")


def _require_identity_tail(state: GaussianState, what: str) -> None:
    if not state.tail.is_identity:
        raise UnsupportedOperationError(f"{what} is only defined for states with a vacuum tail")


# -- transformations --------------------------------------------------------------


def _block_vector(state: GaussianState, v, name: str) -> np.ndarray:
    v = np.atleast_1d(np.asarray(v, dtype=complex))
    if v.ndim != 1:
        raise InvalidInputError(f"{name} must be a vector")
    if not np.all(np.isfinite(v)):
        raise InvalidInputError(f"{name} contains NaN or Inf")
    if len(v) > state.n:
        if np.any(v[state.n:] != 0):
            raise UnsupportedOperationError(f"{name} touches tail modes, which are mean-zero")
        v = v[: state.n]
    return np.concatenate([v, np.zeros(state.n - len(v), complex)])


def displace(state: GaussianState, alpha) -> GaussianState:
    """Conjugate by the Weyl operator W(alpha): w -> w - 2 i alpha."""
    alpha = _block_vector(state, alpha, "alpha")
    return GaussianState(state.mean - 2j * alpha, state.cov, state.tail)


def shale_conjugate(state: GaussianState, L) -> GaussianState:
    """Gamma_s(L)^* rho Gamma_s(L) = rho_g(L^T w, L^T S L); L acts on the block."""
    L = as_block(L, "L")
    if L.shape != state.cov.shape:
        raise InvalidInputError(f"L has shape {L.shape}, expected {state.cov.shape}")
    if not is_symplectic(L):
        raise InvalidInputError("L is not symplectic")
    w0 = L.T @ state.real_mean
    n = state.n
    cov = L.T @ state.cov @ L
    return GaussianState(w0[:n] + 1j * w0[n:], 0.5 * (cov + cov.T), state.tail)


def symplectic_inverse(L) -> np.ndarray:
    """L^{-1} = -J0 L^T J0 for symplectic L."""
    L = as_block(L, "L")
    J = standard_involution(L.shape[0] // 2)
    return -J @ L.T @ J


def apply_gaussian_symmetry(state: GaussianState, alpha, L) -> GaussianState:
    """U rho U^* for U = W(alpha) Gamma_s(L); the phase of U drops out."""
    return displace(shale_conjugate(state, symplectic_inverse(L)), alpha)


def _direct_sum(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Direct sum of two momentum-position blocks, keeping (x..., y...) order."""
    a, b = A.shape[0] // 2, B.shape[0] // 2
    n = a + b
    idx_a = np.r_[0:a, n : n + a]
    idx_b = np.r_[a:n, n + a : 2 * n]
    out = np.zeros((2 * n, 2 * n))
    out[np.ix_(idx_a, idx_a)] = A
    out[np.ix_(idx_b, idx_b)] = B
    return out


def tensor(s1: GaussianState, s2: GaussianState) -> GaussianState:
    """rho_1 (x) rho_2 = rho_g(w1 + w2, S1 + S2) as direct sums.

    At most one factor may carry a non-vacuum tail; the result keeps it and
    lists the block modes of ``s1`` then ``s2`` before the tail.
    """
    if not s1.tail.is_identity and not s2.tail.is_identity:
        raise UnsupportedOperationError("cannot compose two states that both carry tails")
    tail = s2.tail if s1.tail.is_identity else s1.tail
    return GaussianState(
        np.concatenate([s1.mean, s2.mean]), _direct_sum(s1.cov, s2.cov), tail
    )


def marginal(state: GaussianState, modes: Sequence[int], keep_tail: bool = True) -> GaussianState:
    """Reduced state on the selected block modes (in the given order)."""
    modes = [int(m) for m in modes]
    if not modes:
        raise InvalidInputError("marginal needs at least one mode")
    if len(set(modes)) != len(modes) or min(modes) < 0 or max(modes) >= state.n:
        raise InvalidInputError(f"modes must be distinct block indices in [0, {state.n})")
    idx = np.array(modes + [state.n + m for m in modes])
    tail = state.tail if keep_tail else TailModel.identity()
    return GaussianState(state.mean[modes], state.cov[np.ix_(idx, idx)], tail)


def beam_splitter_mix(s1: GaussianState, s2: GaussianState, theta: float) -> GaussianState:
    """Mix two mean-zero states at angle theta: covariance cos^2 S1 + sin^2 S2."""
    if s1.n != s2.n:
        raise InvalidInputError("beam splitter mixing needs equal mode counts")
    for s in (s1, s2):
        _require_mean_zero(s, "beam splitter mixing")
        _require_identity_tail(s, "beam splitter mixing")
        _require_valid(s, "beam splitter mixing")
    c, s = math.cos(theta) ** 2, math.sin(theta) ** 2
    return GaussianState(np.zeros(s1.n, complex), c * s1.cov + s * s2.cov)


# -- structure -------------------------------------------------------------------


def is_pure(state: GaussianState, tol: float = PURITY_TOL) -> bool:
    _require_valid(state, "purity test")
    if not state.tail.is_identity:
        return False
    if state.n == 0:
        return True
    d = williamson(state.cov).d
    return bool(np.all(np.abs(d - 1.0) <= tol))


def extreme_decompose(state: GaussianState) -> ExtremePair:
    """Write S as the midpoint of two pure covariances N^T N and M^T M.

    With S = L^T diag(d, d) L, take P1 = d + sqrt(d^2 - 1), P2 = 1 / P1 and
    N = diag(P1, 1/P1)^{1/2} L, M = diag(P2, 1/P2)^{1/2} L.
    """
    _require_valid(state, "extreme decomposition")
    _require_identity_tail(state, "extreme decomposition")
    wd = williamson(state.cov)
    d = _snap_unit(wd.d.copy())
    p1 = d + np.sqrt(d * d - 1.0)
    p2 = 1.0 / p1
    N = np.concatenate([np.sqrt(p1), 1.0 / np.sqrt(p1)])[:, None] * wd.L
    M = np.concatenate([np.sqrt(p2), 1.0 / np.sqrt(p2)])[:, None] * wd.L
    return ExtremePair(N, M)


def _snap_unit(d: np.ndarray) -> np.ndarray:
    d = np.maximum(d, 1.0)
    d[d - 1.0 <= UNIT_SNAP_TOL] = 1.0
    return d


def _embed_system(L: np.ndarray, n: int) -> np.ndarray:
    """L acting on the first n of 2n modes, identity on the rest."""
    return _direct_sum(L, np.eye(2 * n))


def purify(state: GaussianState) -> GaussianState:
    """A pure state on 2n modes whose marginal on modes 0..n-1 is ``state``.

    Mode j is paired with ancilla n + j in a two-mode squeezed vacuum of
    local covariance d_j; the Williamson factor L is then applied to the
    system modes.
    """
    _require_valid(state, "purification")
    _require_mean_zero(state, "purification")
    _require_identity_tail(state, "purification")
    n = state.n
    if n == 0:
        return vacuum(0)
    wd = williamson(state.cov)
    d = _snap_unit(wd.d.copy())
    c = np.sqrt(d * d - 1.0)
    D, C = np.diag(d), np.diag(c)
    xblock = np.block([[D, C], [C, D]])
    yblock = np.block([[D, -C], [-C, D]])
    zero = np.zeros((2 * n, 2 * n))
    core = np.block([[xblock, zero], [zero, yblock]])
    Lt = _embed_system(wd.L, n)
    cov = Lt.T @ core @ Lt
    return GaussianState(np.zeros(2 * n, complex), 0.5 * (cov + cov.T))


# -- spectrum ---------------------------------------------------------------------


def _vacuum_cutoff(d: float, tol: float) -> bool:
    return d - 1.0 <= tol


def spectrum(state: GaussianState, top_k: int, vacuum_tol: float = 1e-12) -> List[Tuple[float, Tuple[int, ...]]]:
    """Largest eigenvalues p exp(-sum_j s_j k_j) with their occupation vectors.

    p = prod_j (1 - e^{-s_j}) runs over block and tail modes, and
    d_j = coth(s_j / 2).  Eigenvalues are produced in descending order by a
    best-first search over the occupation lattice; tail modes are opened
    lazily since their s_j increase with j.  Equal eigenvalues (exact float
    equality of the exponent) are all reported, ordered lexicographically by
    occupation, so the last level is completed even past ``top_k``.
    Occupation vectors list the n block modes followed by as many tail modes
    as the deepest one excited in the result.
    """
    if int(top_k) != top_k or top_k < 1:
        raise InvalidInputError("top_k must be a positive integer")
    tc = classify_tail(state.tail)
    if not tc.cond3_trace_class:
        raise NoDensityMatrixError("tail is not trace class; the state has no density matrix")
    _require_valid(state, "spectrum")
    n = state.n
    d_block = williamson(state.cov).d if n else np.zeros(0)

    s_values: List[float] = []
    group_of: Dict[float, int] = {}

    def group(s: float) -> int:
        if s not in group_of:
            group_of[s] = len(s_values)
            s_values.append(s)
        return group_of[s]

    log_p = 0.0
    block_groups: List[Optional[int]] = []
    for d in d_block:
        if _vacuum_cutoff(d, vacuum_tol):
            block_groups.append(None)
            continue
        log_p -= math.log1p(0.5 * (d - 1.0))
        block_groups.append(group(math.log1p(2.0 / (d - 1.0))))
    log_p += _tails.tail_log_weight(state.tail)
    has_tail = not state.tail.is_identity
    tail_groups: List[int] = []

    def tail_group(j: int) -> int:
        # j is 0-based within the tail
        while len(tail_groups) <= j:
            tail_groups.append(group(_tails.tail_s(state.tail, len(tail_groups) + 1)))
        return tail_groups[j]

    def exponent(occ: Tuple[int, ...]) -> float:
        # integer totals per distinct s keep degenerate levels bit-identical
        totals: Dict[int, int] = {}
        for i, k in enumerate(occ):
            if k:
                g = block_groups[i] if i < n else tail_group(i - n)
                totals[g] = totals.get(g, 0) + k
        return sum(s_values[g] * totals[g] for g in sorted(totals))

    def trim(occ: List[int]) -> Tuple[int, ...]:
        while len(occ) > n and occ[-1] == 0:
            occ.pop()
        return tuple(occ)

    def successors(occ: Tuple[int, ...]):
        for i in range(n):
            if block_groups[i] is not None:
                nxt = list(occ)
                nxt[i] += 1
                yield tuple(nxt)
        if not has_tail:
            return
        depth = len(occ) - n
        for j in range(depth + 1):
            nxt = list(occ) + [0]
            nxt[n + j] += 1
            yield trim(nxt)
        if depth:
            nxt = list(occ) + [0]
            nxt[n + depth - 1] -= 1
            nxt[n + depth] += 1
            yield trim(nxt)

    start = tuple([0] * n)
    heap = [(0.0, start)]
    seen = {start}
    found: List[Tuple[float, Tuple[int, ...]]] = []
    while heap:
        e, occ = heapq.heappop(heap)
        if len(found) >= top_k and e != found[-1][0]:
            break
        found.append((e, occ))
        for nxt in successors(occ):
            if nxt not in seen:
                seen.add(nxt)
                heapq.heappush(heap, (exponent(nxt), nxt))
    width = max(len(occ) for _, occ in found)
    return [(math.exp(log_p - e), occ + (0,) * (width - len(occ))) for e, occ in found]


def spectrum_levels(entries) -> List[Tuple[float, int]]:
    """Collapse ``spectrum`` output into (eigenvalue, multiplicity) pairs."""
    levels: List[Tuple[float, int]] = []
    for value, _ in entries:
        if levels and levels[-1][0] == value:
            levels[-1] = (value, levels[-1][1] + 1)
        else:
            levels.append((value, 1))
    return levels


# -- positivity of the characteristic kernel -----------------------------------------


def kernel_matrix(state: GaussianState, points) -> np.ndarray:
    """K[j, k] = exp(i Im<z_j, z_k>) rho^(z_k - z_j)."""
    Z = np.atleast_2d(np.asarray(points, dtype=complex))
    if not np.all(np.isfinite(Z)):
        raise InvalidInputError("points contain NaN or Inf")
    m = Z.shape[0]
    phase = np.exp(1j * (np.conj(Z) @ Z.T).imag)
    diffs = (Z[None, :, :] - Z[:, None, :]).reshape(m * m, -1)
    K = phase * characteristic_function(state, diffs).reshape(m, m)
    return 0.5 * (K + K.conj().T)


def kernel_psd_check(state: GaussianState, points, tol: float = 1e-9) -> Tuple[float, bool]:
    """Minimum eigenvalue of the kernel matrix and the verdict ``>= -tol``."""
    min_eig = float(np.linalg.eigvalsh(kernel_matrix(state, points))[0])
    return min_eig, bool(min_eig >= -tol)
