"""Dense truncated Fock-space oracle.

Every mode is cut off at occupation N_j - 1 and operators are dense matrices
over the product occupation basis |k_1, ..., k_m> in ``np.kron`` order (last
mode fastest).  Nothing here uses the phase-space formulas of
:mod:`gaussfock.states`; states are built from ladder operators, matrix
exponentials and thermal weights, and characteristic functions are computed
as tr(rho W(z)).

Truncation only corrupts matrix elements near the cutoff, so residual checks
are taken on a low-occupation block (occupations < ``levels`` per mode).
"""

import math
import os
from dataclasses import dataclass, field
from functools import lru_cache, reduce
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg
from scipy.special import gammaln

from .exceptions import (
    CapacityError,
    InvalidDimensionError,
    InvalidInputError,
    InvalidParameterError,
    ValidationError,
)
from .states import GaussianState, characteristic_function, validate
from .symplectic import block_to_complex, decompose_symplectic, williamson

DEFAULT_MEM_CAP = 4096


def memory_cap() -> int:
    raw = os.environ.get("GAUSSFOCK_MEM_CAP")
    if raw is None:
        return DEFAULT_MEM_CAP
    try:
        cap = int(raw)
    except ValueError:
        raise InvalidInputError(f"GAUSSFOCK_MEM_CAP must be an integer, got {raw!r}") from None
    if cap < 2:
        raise InvalidInputError("GAUSSFOCK_MEM_CAP must be at least 2")
    return cap


@dataclass(frozen=True)
class FockBasis:
    """Product occupation basis with per-mode cutoffs N_j (occupations 0..N_j-1)."""

    cutoffs: Tuple[int, ...]
    mem_cap: int = field(default_factory=memory_cap)

    def __post_init__(self):
        cutoffs = tuple(int(c) for c in np.atleast_1d(self.cutoffs))
        if not cutoffs:
            raise InvalidDimensionError("a Fock basis needs at least one mode")
        if min(cutoffs) < 2:
            raise InvalidDimensionError(f"every cutoff must be >= 2, got {cutoffs}")
        object.__setattr__(self, "cutoffs", cutoffs)
        if self.dim > self.mem_cap:
            raise CapacityError(
                f"Fock dimension {self.dim} exceeds the cap {self.mem_cap} (GAUSSFOCK_MEM_CAP)"
            )

    @classmethod
    def uniform(cls, modes: int, cutoff: int, **kw) -> "FockBasis":
        return cls((cutoff,) * modes, **kw)

    @property
    def modes(self) -> int:
        return len(self.cutoffs)

    @property
    def dim(self) -> int:
        return int(np.prod(self.cutoffs))

    def occupations(self) -> np.ndarray:
        """(dim, modes) array; row i is the occupation vector of basis state i."""
        grids = np.meshgrid(*[np.arange(c) for c in self.cutoffs], indexing="ij")
        return np.stack([g.reshape(-1) for g in grids], axis=1)

    def low_block(self, levels: Optional[Sequence[int]] = None) -> np.ndarray:
        """Indices of basis states with every occupation below ``levels``.

        The default keeps the lower half of each mode.
        """
        if levels is None:
            levels = [c // 2 for c in self.cutoffs]
        levels = np.broadcast_to(np.asarray(levels), (self.modes,))
        return np.flatnonzero(np.all(self.occupations() < levels, axis=1))

    def embed(self, op: np.ndarray, mode: int) -> np.ndarray:
        """Single-mode operator acting on ``mode``, identity elsewhere."""
        factors = [np.eye(c) for c in self.cutoffs]
        factors[mode] = op
        return reduce(np.kron, factors)


def _check_cutoff(cutoff: int) -> int:
    if int(cutoff) != cutoff or cutoff < 2:
        raise InvalidDimensionError(f"cutoff must be an integer >= 2, got {cutoff}")
    return int(cutoff)


@lru_cache(maxsize=64)
def _ladder(cutoff: int):
    a = np.diag(np.sqrt(np.arange(1, cutoff, dtype=float)), 1).astype(complex)
    a.setflags(write=False)
    adag = a.conj().T
    adag.setflags(write=False)
    return a, adag


def ladder(cutoff: int) -> Tuple[np.ndarray, np.ndarray]:
    """Annihilation and creation matrices: a|k> = sqrt(k)|k-1>."""
    a, adag = _ladder(_check_cutoff(cutoff))
    return a.copy(), adag.copy()


def number(cutoff: int) -> np.ndarray:
    return np.diag(np.arange(_check_cutoff(cutoff), dtype=float)).astype(complex)


def quadratures(cutoff: int) -> Tuple[np.ndarray, np.ndarray]:
    """Position q = (a + a^dag)/sqrt(2) and momentum p = -i(a - a^dag)/sqrt(2)."""
    a, adag = _ladder(_check_cutoff(cutoff))
    q = (a + adag) / math.sqrt(2.0)
    p = -1j * (a - adag) / math.sqrt(2.0)
    return q, p


def _mode_vector(basis: FockBasis, v, name: str) -> np.ndarray:
    v = np.atleast_1d(np.asarray(v, dtype=complex))
    if v.ndim != 1 or len(v) > basis.modes:
        raise InvalidInputError(f"{name} must be a vector with at most {basis.modes} entries")
    if not np.all(np.isfinite(v)):
        raise InvalidInputError(f"{name} contains NaN or Inf")
    return np.concatenate([v, np.zeros(basis.modes - len(v), complex)])


def single_mode_weyl(cutoff: int, z: complex) -> np.ndarray:
    """exp(-i sqrt(2) (x p - y q)) for z = x + iy on one truncated mode."""
    q, p = quadratures(cutoff)
    x, y = z.real, z.imag
    return linalg.expm(-1j * math.sqrt(2.0) * (x * p - y * q))


def weyl_matrix(basis: FockBasis, z) -> np.ndarray:
    """Weyl operator W(z) as the tensor product of single-mode exponentials."""
    z = _mode_vector(basis, z, "z")
    return reduce(np.kron, [single_mode_weyl(c, zj) for c, zj in zip(basis.cutoffs, z)])


def _single_exponential(cutoff: int, f: complex) -> np.ndarray:
    k = np.arange(cutoff)
    out = np.zeros(cutoff, complex)
    if f == 0:
        out[0] = 1.0
        return out
    # f^k / sqrt(k!) through logs to avoid overflow at large k
    mag = np.exp(k * math.log(abs(f)) - 0.5 * gammaln(k + 1))
    return mag * np.exp(1j * k * np.angle(f))


def exponential_vector(basis: FockBasis, f) -> np.ndarray:
    """Truncated e(f) = sum_k f^k / sqrt(k!) |k>."""
    f = _mode_vector(basis, f, "f")
    return reduce(np.kron, [_single_exponential(c, fj) for c, fj in zip(basis.cutoffs, f)])


def _positive_per_mode(basis: FockBasis, s, name: str) -> np.ndarray:
    s = np.asarray(s, dtype=float).reshape(-1)
    if len(s) == 1 and basis.modes > 1:
        s = np.repeat(s, basis.modes)
    if len(s) != basis.modes:
        raise InvalidInputError(f"{name} needs one entry per mode")
    if np.any(~(s > 0)):
        raise InvalidParameterError(f"{name} must be > 0 for every mode")
    return s


def _thermal_weights(cutoff: int, q: float) -> np.ndarray:
    """(1 - q) q^k for k < cutoff; q = e^{-s}, q = 0 is the vacuum."""
    return (1.0 - q) * q ** np.arange(cutoff)


def thermal_density(basis: FockBasis, s) -> np.ndarray:
    """Diagonal density (x)_j (1 - e^{-s_j}) e^{-s_j a_j^dag a_j}."""
    s = _positive_per_mode(basis, s, "s")
    diag = reduce(np.kron, [_thermal_weights(c, math.exp(-sj)) for c, sj in zip(basis.cutoffs, s)])
    return np.diag(diag).astype(complex)


def thermal_trace_deficit(basis: FockBasis, s) -> float:
    """1 - trace of the truncated thermal density: 1 - prod_j (1 - e^{-s_j N_j})."""
    s = _positive_per_mode(basis, s, "s")
    return 1.0 - float(np.prod([-math.expm1(-sj * c) for c, sj in zip(basis.cutoffs, s)]))


def second_quantize_diag(basis: FockBasis, lam) -> np.ndarray:
    """Gamma_s(diag(lambda)) = prod_j lambda_j^{k_j} on |k>, for |lambda_j| <= 1."""
    lam = np.asarray(lam, dtype=complex).reshape(-1)
    if len(lam) == 1 and basis.modes > 1:
        lam = np.repeat(lam, basis.modes)
    if len(lam) != basis.modes:
        raise InvalidInputError("lambda needs one entry per mode")
    if np.any(np.abs(lam) > 1.0 + 1e-12):
        raise InvalidParameterError("second quantization needs a contraction, |lambda| <= 1")
    diag = reduce(np.kron, [lj ** np.arange(c) for c, lj in zip(basis.cutoffs, lam)])
    return np.diag(diag)


def squeeze_matrix(cutoff: int, r: float) -> np.ndarray:
    """exp((r/2)(a^2 - a^dag^2)).

    This is the Shale unitary of the one-mode map u + iv -> e^{-r} u + i e^{r} v;
    conjugation gives S(r) W(z) S(r)^* = W(e^{-r} x + i e^{r} y).
    """
    a, adag = _ladder(_check_cutoff(cutoff))
    return linalg.expm(0.5 * r * (a @ a - adag @ adag))


def second_quantize_unitary(basis: FockBasis, U) -> np.ndarray:
    """Gamma_s(U) for a complex unitary U on the mode space.

    With U = exp(iH), Gamma_s(U) = exp(i sum_jk H_jk a_j^dag a_k), which
    maps e(f) to e(Uf).
    """
    U = np.atleast_2d(np.asarray(U, dtype=complex))
    m = basis.modes
    if U.shape != (m, m):
        raise InvalidInputError(f"U must be {m} x {m}")
    if np.abs(U.conj().T @ U - np.eye(m)).max() > 1e-9:
        raise InvalidInputError("U is not unitary")
    T, Z = linalg.schur(U, output="complex")
    H = (Z * np.angle(np.diag(T))) @ Z.conj().T
    lowers = [basis.embed(_ladder(c)[0], j) for j, c in enumerate(basis.cutoffs)]
    gen = np.zeros((basis.dim, basis.dim), complex)
    for j in range(m):
        for k in range(m):
            if H[j, k] != 0:
                gen += H[j, k] * (lowers[j].conj().T @ lowers[k])
    return linalg.expm(1j * gen)


def shale_unitary(basis: FockBasis, L) -> np.ndarray:
    """A matrix realization of Gamma_s(L), with Gamma_s(L) W(u) Gamma_s(L)^* = W(Lu).

    L = U diag(a, 1/a) V is realized as Gamma_s(U) Gamma_s(T) Gamma_s(V),
    the unitary factors through number-conserving generators and T through
    one squeeze per mode with r_j = -log a_j.  The overall phase is not
    normalized.
    """
    U0, a, V0 = decompose_symplectic(L)
    if len(a) != basis.modes:
        raise InvalidInputError("L does not match the number of modes in the basis")
    squeezes = reduce(np.kron, [squeeze_matrix(c, -math.log(aj)) for c, aj in zip(basis.cutoffs, a)])
    GU = second_quantize_unitary(basis, block_to_complex(U0))
    GV = second_quantize_unitary(basis, block_to_complex(V0))
    return GU @ squeezes @ GV


def gaussian_density(state: GaussianState, basis: FockBasis, vacuum_tol: float = 1e-12) -> np.ndarray:
    """Density matrix of a finite-mode Gaussian state built from its Williamson form.

    rho = W(beta)^* Gamma_s(L)^* [(x)_j thermal(d_j)] Gamma_s(L) W(beta) with
    S = L^T diag(d, d) L and beta = -i w / 2; modes with d_j = 1 are vacuum.
    """
    if not state.tail.is_identity:
        raise InvalidInputError("the oracle only represents states with a vacuum tail")
    if state.n != basis.modes:
        raise InvalidInputError(f"state has {state.n} modes, basis has {basis.modes}")
    if not validate(state).verdict:
        raise ValidationError("state is not an admissible Gaussian state")
    wd = williamson(state.cov)
    weights = []
    for c, d in zip(basis.cutoffs, wd.d):
        q = 0.0 if d - 1.0 <= vacuum_tol else (d - 1.0) / (d + 1.0)
        weights.append(_thermal_weights(c, q))
    core = np.diag(reduce(np.kron, weights)).astype(complex)
    G = shale_unitary(basis, wd.L)
    Wb = weyl_matrix(basis, -0.5j * state.mean)
    X = G @ Wb
    rho = X.conj().T @ core @ X
    return 0.5 * (rho + rho.conj().T)


def oracle_char_fn(rho: np.ndarray, basis: FockBasis, z) -> complex:
    """tr(rho W(z))."""
    W = weyl_matrix(basis, z)
    return complex(np.sum(rho * W.T))


def oracle_spectrum(rho: np.ndarray, top_k: int) -> np.ndarray:
    """Largest ``top_k`` eigenvalues of a Hermitian matrix, descending."""
    rho = np.asarray(rho)
    if np.abs(rho - rho.conj().T).max() > 1e-10:
        raise InvalidInputError("rho is not Hermitian")
    return np.linalg.eigvalsh(rho)[::-1][: int(top_k)]


@dataclass
class OracleReport:
    passed: bool
    max_deviation: float
    tol: float
    deviations: List[float]
    trace_deficit: float
    min_eigenvalue: float
    hermiticity_residual: float

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "max_deviation": self.max_deviation,
            "tol": self.tol,
            "samples": len(self.deviations),
            "deviations": self.deviations,
            "trace_deficit": self.trace_deficit,
            "min_eigenvalue": self.min_eigenvalue,
            "hermiticity_residual": self.hermiticity_residual,
        }


def verify_gaussian(state: GaussianState, basis: FockBasis, samples, tol: float) -> OracleReport:
    """Compare tr(rho W(z)) of the oracle density with the phase-space formula."""
    rho = gaussian_density(state, basis)
    samples = np.atleast_2d(np.asarray(samples, dtype=complex))
    deviations = [
        abs(oracle_char_fn(rho, basis, z) - characteristic_function(state, z)) for z in samples
    ]
    worst = max(deviations) if deviations else 0.0
    return OracleReport(
        passed=bool(worst <= tol),
        max_deviation=float(worst),
        tol=tol,
        deviations=[float(x) for x in deviations],
        trace_deficit=float(1.0 - np.trace(rho).real),
        min_eigenvalue=float(np.linalg.eigvalsh(rho)[0]),
        hermiticity_residual=float(np.abs(rho - rho.conj().T).max()),
    )


def random_disk(rng: np.random.Generator, count: int, modes: int, radius: float = 1.0) -> np.ndarray:
    """``count`` complex vectors with Euclidean norm at most ``radius``."""
    v = rng.normal(size=(count, modes)) + 1j * rng.normal(size=(count, modes))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return v * radius * rng.uniform(0, 1, size=(count, 1)) ** (1.0 / (2 * modes))


def _project(basis: FockBasis, M: np.ndarray, levels) -> np.ndarray:
    idx = basis.low_block(levels)
    return M[np.ix_(idx, idx)]


def weyl_relation_residual(basis: FockBasis, f, g, levels=None) -> float:
    """Projected max |W(f)W(g) - exp(-i Im<f,g>) W(f+g)|."""
    f = _mode_vector(basis, f, "f")
    g = _mode_vector(basis, g, "g")
    phase = np.exp(-1j * np.vdot(f, g).imag)
    R = weyl_matrix(basis, f) @ weyl_matrix(basis, g) - phase * weyl_matrix(basis, f + g)
    return float(np.abs(_project(basis, R, levels)).max())


def unitarity_residual(basis: FockBasis, U: np.ndarray, levels=None) -> float:
    return float(np.abs(_project(basis, U.conj().T @ U - np.eye(basis.dim), levels)).max())


def exponential_inner_residual(basis: FockBasis, f, g) -> float:
    """|<e(f), e(g)> - exp<f, g>|."""
    ef = exponential_vector(basis, f)
    eg = exponential_vector(basis, g)
    f = _mode_vector(basis, f, "f")
    g = _mode_vector(basis, g, "g")
    return float(abs(np.vdot(ef, eg) - np.exp(np.vdot(f, g))))


def weyl_action_residual(basis: FockBasis, f, g) -> float:
    """max |W(f) e(g) - exp(-|f|^2/2 - <f, g>) e(f + g)|."""
    f = _mode_vector(basis, f, "f")
    g = _mode_vector(basis, g, "g")
    lhs = weyl_matrix(basis, f) @ exponential_vector(basis, g)
    rhs = np.exp(-0.5 * np.vdot(f, f).real - np.vdot(f, g)) * exponential_vector(basis, f + g)
    return float(np.abs(lhs - rhs).max())


def shale_action_residual(basis: FockBasis, L, u, levels=None) -> float:
    """Projected max |G W(u) G^* - W(Lu)| with G = shale_unitary(basis, L)."""
    u = _mode_vector(basis, u, "u")
    G = shale_unitary(basis, L)
    u0 = np.concatenate([u.real, u.imag])
    Lu0 = np.asarray(L, dtype=float) @ u0
    Lu = Lu0[: basis.modes] + 1j * Lu0[basis.modes:]
    R = G @ weyl_matrix(basis, u) @ G.conj().T - weyl_matrix(basis, Lu)
    return float(np.abs(_project(basis, R, levels)).max())


def verify_weyl(cutoff: int, pairs: int, tol: float, seed: Optional[int] = None, levels=None) -> dict:
    """Weyl relation on ``pairs`` random single-mode pairs with |f|, |g| <= 1."""
    basis = FockBasis((cutoff,))
    rng = np.random.default_rng(seed)
    fs = random_disk(rng, pairs, 1)
    gs = random_disk(rng, pairs, 1)
    residuals = [weyl_relation_residual(basis, f, g, levels) for f, g in zip(fs, gs)]
    worst = max(residuals)
    return {
        "passed": bool(worst <= tol),
        "max_residual": worst,
        "tol": tol,
        "pairs": pairs,
        "levels": basis.cutoffs[0] // 2 if levels is None else levels,
    }


def verify_shale_action(cutoff: int, r: float, u: complex, tol: float = 1e-5, levels: Optional[int] = None) -> dict:
    """Projected max |S(r) W(u) S(r)^* - W(e^{-r} Re u + i e^{r} Im u)| on one mode.

    The default projection keeps occupations below cutoff // 8, where the
    squeezed Weyl matrix is still free of truncation error.
    """
    basis = FockBasis((cutoff,))
    S = squeeze_matrix(cutoff, r)
    u = complex(u)
    target = complex(math.exp(-r) * u.real, math.exp(r) * u.imag)
    R = S @ single_mode_weyl(cutoff, u) @ S.conj().T - single_mode_weyl(cutoff, target)
    levels = max(1, cutoff // 8) if levels is None else levels
    residual = float(np.abs(_project(basis, R, [levels])).max())
    return {"passed": residual <= tol, "residual": residual, "tol": tol, "levels": levels}
