"""Closed-form models for the infinitely many modes beyond the finite block.

Tail modes are diagonal and complex linear: mode j of the tail (counted from
1) has covariance d_j on both its position and momentum coordinate.  Three
families are supported so that the summability conditions can be decided
exactly rather than estimated:

* ``identity``:  d_j = 1
* ``geometric``: d_j = 1 + a r^j,   a > 0, 0 < r < 1
* ``power``:     d_j = 1 + a / j^p, a > 0, p > 0
"""

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .exceptions import (
    InfiniteParameterError,
    InvalidIndexError,
    InvalidInputError,
    InvalidParameterError,
)

KINDS = ("identity", "geometric", "power")


@dataclass(frozen=True)
class TailModel:
    kind: str = "identity"
    a: Optional[float] = None
    r: Optional[float] = None
    p: Optional[float] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidInputError(f"unknown tail kind {self.kind!r}")
        if self.kind == "identity":
            return
        if self.a is None or not (math.isfinite(self.a) and self.a > 0):
            raise InvalidParameterError("tail amplitude a must be finite and > 0")
        if self.kind == "geometric":
            if self.r is None or not (0 < self.r < 1):
                raise InvalidParameterError("geometric ratio must satisfy 0 < r < 1")
        else:
            if self.p is None or not (math.isfinite(self.p) and self.p > 0):
                raise InvalidParameterError("power exponent must be finite and > 0")

    @classmethod
    def identity(cls) -> "TailModel":
        return cls("identity")

    @classmethod
    def geometric(cls, a: float, r: float) -> "TailModel":
        return cls("geometric", a=float(a), r=float(r))

    @classmethod
    def power(cls, a: float, p: float) -> "TailModel":
        return cls("power", a=float(a), p=float(p))

    @property
    def is_identity(self) -> bool:
        return self.kind == "identity"

    def to_json(self) -> dict:
        if self.kind == "identity":
            return {"kind": "identity"}
        if self.kind == "geometric":
            return {"kind": "geometric", "a": self.a, "r": self.r}
        return {"kind": "power", "a": self.a, "p": self.p}

    @classmethod
    def from_json(cls, obj) -> "TailModel":
        if not isinstance(obj, dict) or "kind" not in obj:
            raise InvalidInputError("tail must be an object with a 'kind' field")
        kind = obj["kind"]
        try:
            if kind == "identity":
                return cls.identity()
            if kind == "geometric":
                return cls.geometric(obj["a"], obj["r"])
            if kind == "power":
                return cls.power(obj["a"], obj["p"])
        except (KeyError, TypeError) as exc:
            raise InvalidInputError(f"malformed {kind} tail: {exc}") from None
        raise InvalidInputError(f"unknown tail kind {kind!r}")


@dataclass(frozen=True)
class TailClassification:
    cond1_uncertainty: bool
    cond2_hilbert_schmidt: bool
    cond3_trace_class: bool
    witness: str

    def to_json(self) -> dict:
        return {
            "cond1_uncertainty": self.cond1_uncertainty,
            "cond2_hilbert_schmidt": self.cond2_hilbert_schmidt,
            "cond3_trace_class": self.cond3_trace_class,
            "witness": self.witness,
        }


def _excess(tail: TailModel, j):
    """d_j - 1, vectorized over ``j``."""
    j = np.asarray(j, dtype=float)
    if tail.kind == "identity":
        return np.zeros_like(j)
    if tail.kind == "geometric":
        return tail.a * tail.r ** j
    return tail.a / j ** tail.p


def _check_index(j) -> int:
    if int(j) != j or j < 1:
        raise InvalidIndexError(f"tail modes are indexed from 1, got {j}")
    return int(j)


def tail_d(tail: TailModel, j: int) -> float:
    """Symplectic eigenvalue d_j of the j-th tail mode."""
    j = _check_index(j)
    return 1.0 + float(_excess(tail, j))


def tail_s(tail: TailModel, j: int) -> float:
    """Inverse temperature s_j with coth(s_j / 2) = d_j.

    Uses s = log((d + 1) / (d - 1)) written in terms of the excess d - 1 so
    that tails close to the vacuum keep full precision.
    """
    j = _check_index(j)
    excess = float(_excess(tail, j))
    if excess <= 0.0:
        raise InfiniteParameterError(f"tail mode {j} is in the vacuum (d = 1), s is infinite")
    return math.log1p(2.0 / excess)


def classify_tail(tail: TailModel) -> TailClassification:
    """Exact verdicts for d_j >= 1, sum (d_j - 1)^2 < inf and sum (d_j - 1) < inf."""
    if tail.kind == "identity":
        return TailClassification(True, True, True, "all terms vanish")
    if tail.kind == "geometric":
        return TailClassification(
            True, True, True, f"geometric series with ratio {tail.r} < 1 (and {tail.r}^2 for squares)"
        )
    p = tail.p
    cond2 = 2 * p > 1
    cond3 = p > 1
    witness = (
        f"p-series test: sum j^-{p} {'converges' if cond3 else 'diverges'} (p {'>' if cond3 else '<='} 1), "
        f"sum j^-{2 * p} {'converges' if cond2 else 'diverges'} (2p {'>' if cond2 else '<='} 1)"
    )
    return TailClassification(True, cond2, cond3, witness)


def tail_partial_sums(tail: TailModel, terms: int, chunk: int = 1 << 18) -> Tuple[float, float]:
    """Partial sums of (d_j - 1) and (d_j - 1)^2 over j = 1..terms."""
    if int(terms) != terms or terms < 1:
        raise InvalidInputError(f"terms must be a positive integer, got {terms}")
    s1 = s2 = 0.0
    for start in range(1, int(terms) + 1, chunk):
        j = np.arange(start, min(start + chunk, int(terms) + 1))
        e = _excess(tail, j)
        s1 += math.fsum(e)
        s2 += math.fsum(e * e)
    return s1, s2


def tail_log_weight(tail: TailModel, rtol: float = 1e-13) -> float:
    """log prod_j (1 - e^{-s_j}) over the whole tail.

    With 1 - e^{-s} = 2 / (d + 1) each factor is -log1p((d - 1) / 2).
    Geometric tails are summed until terms drop below ``rtol``; power tails
    are summed explicitly to a cutoff J and the remainder is bounded by the
    integral a / (2 (p - 1) J^(p - 1)), which is exact to O(J^-p).
    """
    if tail.kind == "identity":
        return 0.0
    if not classify_tail(tail).cond3_trace_class:
        return -math.inf
    if tail.kind == "geometric":
        total = 0.0
        j = 1
        while True:
            term = math.log1p(0.5 * tail.a * tail.r ** j)
            total += term
            if term < rtol * max(total, 1e-300):
                return -total
            j += 1
    cutoff = 1 << 20
    j = np.arange(1, cutoff + 1, dtype=float)
    head = math.fsum(np.log1p(0.5 * tail.a / j ** tail.p))
    # midpoint correction: integrate from J + 1/2
    rest = 0.5 * tail.a / ((tail.p - 1.0) * (cutoff + 0.5) ** (tail.p - 1.0))
    return -(head + rest)
