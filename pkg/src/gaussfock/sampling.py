"""Random symplectic matrices and covariance blocks for tests and benchmarks."""

import numpy as np
from scipy.stats import unitary_group

from .symplectic import complex_to_block, t_form


def random_orthogonal_symplectic(n: int, rng: np.random.Generator) -> np.ndarray:
    """Block form of a Haar-random n x n unitary."""
    U = unitary_group.rvs(n, random_state=rng) if n > 1 else np.exp(2j * np.pi * rng.uniform(size=(1, 1)))
    return complex_to_block(U)


def random_symplectic(n: int, rng: np.random.Generator, max_squeeze: float = 1.0) -> np.ndarray:
    """U diag(a, 1/a) V with log a uniform in [-max_squeeze, max_squeeze]."""
    a = np.exp(rng.uniform(-max_squeeze, max_squeeze, size=n))
    return random_orthogonal_symplectic(n, rng) @ t_form(a) @ random_orthogonal_symplectic(n, rng)


def covariance_from(L: np.ndarray, d) -> np.ndarray:
    d = np.asarray(d, dtype=float)
    S = L.T @ np.diag(np.concatenate([d, d])) @ L
    return 0.5 * (S + S.T)


def random_valid_covariance(n: int, rng: np.random.Generator, d_max: float = 3.0,
                            max_squeeze: float = 1.0, pure: bool = False) -> np.ndarray:
    d = np.ones(n) if pure else rng.uniform(1.0, d_max, size=n)
    return covariance_from(random_symplectic(n, rng, max_squeeze), d)


def random_spd(dim: int, rng: np.random.Generator, ridge: float = 0.1) -> np.ndarray:
    """Wishart-type SPD matrix A A^T / dim + ridge I."""
    A = rng.normal(size=(dim, dim))
    S = A @ A.T / dim + ridge * np.eye(dim)
    return 0.5 * (S + S.T)
