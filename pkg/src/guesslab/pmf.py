"""Probability vectors, joint distributions, majorization and entropy functionals.

Every information quantity is returned in bits unless ``base`` is given.
Zero masses are kept in the vectors; ``0 log 0 = 0`` and ``0**alpha = 0``
for ``alpha > 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Union

import numpy as np

from .errors import InputError

SUM_TOL = 1e-9
MAJORIZATION_TOL = 1e-12


def _validated(masses, ndim: int, what: str) -> np.ndarray:
    arr = np.array(masses, dtype=float)
    if arr.ndim != ndim or arr.size == 0:
        raise InputError(f"{what} must be a non-empty {ndim}-d array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{what} has non-finite entries")
    if np.any(arr < 0):
        raise InputError(f"{what} has negative entries")
    total = float(arr.sum())
    if abs(total - 1.0) > SUM_TOL:
        raise InputError(f"{what} sums to {total!r}, not 1 (tolerance {SUM_TOL})")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Pmf:
    """A probability vector on ``[1..support_size]`` (stored 0-based)."""

    masses: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "masses", _validated(self.masses, 1, "pmf"))

    @property
    def support_size(self) -> int:
        return int(self.masses.size)

    def __len__(self) -> int:
        return self.support_size

    def __repr__(self) -> str:
        return f"Pmf({self.masses.tolist()})"

    @property
    def p_max(self) -> float:
        return float(self.masses.max())

    def support(self) -> np.ndarray:
        """Indices (0-based) of the symbols with positive mass."""
        return np.flatnonzero(self.masses > 0)

    def sorted_desc(self) -> np.ndarray:
        return np.sort(self.masses)[::-1]

    def allclose(self, other: "Pmf | Iterable[float]", atol: float = 1e-12) -> bool:
        theirs = other.masses if isinstance(other, Pmf) else np.asarray(other, dtype=float)
        return theirs.shape == self.masses.shape and bool(np.allclose(self.masses, theirs, atol=atol, rtol=0))

    def to_json(self) -> dict:
        return {"pmf": self.masses.tolist()}


@dataclass(frozen=True, eq=False)
class JointPmf:
    """A probability matrix ``masses[x, y]`` on a finite product set."""

    masses: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "masses", _validated(self.masses, 2, "joint pmf"))

    @property
    def x_size(self) -> int:
        return int(self.masses.shape[0])

    @property
    def y_size(self) -> int:
        return int(self.masses.shape[1])

    @property
    def shape(self) -> tuple[int, int]:
        return self.x_size, self.y_size

    def __repr__(self) -> str:
        return f"JointPmf({self.masses.tolist()})"

    def allclose(self, other: "JointPmf | Iterable", atol: float = 1e-12) -> bool:
        theirs = other.masses if isinstance(other, JointPmf) else np.asarray(other, dtype=float)
        return theirs.shape == self.masses.shape and bool(np.allclose(self.masses, theirs, atol=atol, rtol=0))

    def to_json(self) -> dict:
        return {"joint": self.masses.tolist()}


AnyPmf = Union[Pmf, JointPmf]


def make_pmf(weights) -> Pmf:
    """Normalize non-negative weights into a :class:`Pmf`."""
    arr = np.array(weights, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise InputError("weights must be a non-empty vector")
    if not np.all(np.isfinite(arr)) or np.any(arr < 0):
        raise InputError("weights must be finite and non-negative")
    total = arr.sum()
    if total <= 0:
        raise InputError("weights must not all be zero")
    return Pmf(arr / total)


def make_joint(weights) -> JointPmf:
    arr = np.array(weights, dtype=float)
    if arr.ndim != 2 or arr.size == 0:
        raise InputError("weights must be a non-empty matrix")
    if not np.all(np.isfinite(arr)) or np.any(arr < 0):
        raise InputError("weights must be finite and non-negative")
    total = arr.sum()
    if total <= 0:
        raise InputError("weights must not all be zero")
    return JointPmf(arr / total)


def product_joint(px: Pmf, py: Pmf) -> JointPmf:
    """Joint law of independent X ~ px and Y ~ py."""
    return JointPmf(np.outer(px.masses, py.masses))


def top_mass(p: Pmf, k: int) -> float:
    """Sum of the ``k`` largest point masses, ``G_P(k)``."""
    if not 1 <= k <= p.support_size:
        raise InputError(f"k={k} outside [1, {p.support_size}]")
    return math.fsum(p.sorted_desc()[:k])


def _cumulative_top(masses: np.ndarray, length: int) -> np.ndarray:
    padded = np.zeros(length)
    padded[: masses.size] = np.sort(masses)[::-1]
    return np.cumsum(padded)


def majorizes(p: Pmf, q: Pmf) -> bool:
    """True iff ``q`` majorizes ``p`` (``p ≺ q``); the shorter vector is zero-padded."""
    length = max(p.support_size, q.support_size)
    gp = _cumulative_top(p.masses, length)
    gq = _cumulative_top(q.masses, length)
    return bool(np.all(gp <= gq + MAJORIZATION_TOL))


def _check_order(alpha: float) -> float:
    alpha = float(alpha)
    if math.isnan(alpha) or alpha < 0:
        raise InputError(f"entropy order must be positive, got {alpha}")
    return alpha


def _log_sum_pow(v: np.ndarray, alpha: float) -> float:
    """Natural log of ``sum(v**alpha)`` over the positive entries of ``v``."""
    v = v[v > 0]
    vmax = v.max()
    return alpha * math.log(vmax) + math.log(math.fsum((v / vmax) ** alpha))


def _xlog2x_sum(v: np.ndarray) -> float:
    v = v[v > 0]
    return -math.fsum(v * np.log2(v))


def renyi_entropy(p: AnyPmf, alpha: float, base: float = 2.0) -> float:
    """Order-``alpha`` Rényi entropy; ``alpha`` in {0, 1, inf} use the limit formulas."""
    alpha = _check_order(alpha)
    masses = np.asarray(p.masses).ravel()
    if alpha == 1:
        h_bits = _xlog2x_sum(masses)
    elif math.isinf(alpha):
        h_bits = -math.log2(masses.max())
    elif alpha == 0:
        h_bits = math.log2(np.count_nonzero(masses))
    else:
        h_bits = _log_sum_pow(masses, alpha) / (1.0 - alpha) / math.log(2)
    # exact zero for point masses, avoiding -0.0 and rounding noise
    if np.count_nonzero(masses) == 1:
        return 0.0
    return h_bits if base == 2 else h_bits * math.log(2) / math.log(base)


def shannon_entropy(p: AnyPmf, base: float = 2.0) -> float:
    return renyi_entropy(p, 1, base)


def marginals(joint: JointPmf) -> tuple[Pmf, Pmf]:
    """(X-marginal, Y-marginal) of ``joint``."""
    m = joint.masses
    return Pmf(m.sum(axis=1)), Pmf(m.sum(axis=0))


def conditional_rows(joint: JointPmf) -> np.ndarray:
    """Matrix whose row ``y`` is ``P_{X|Y}(.|y)``.

    Rows for ``P_Y(y) = 0`` are the undefined-conditional marker: all NaN.
    """
    m = joint.masses
    py = m.sum(axis=0)
    out = np.full((joint.y_size, joint.x_size), np.nan)
    ok = py > 0
    out[ok] = (m[:, ok] / py[ok]).T
    return out


def arimoto_conditional_entropy(joint: JointPmf, alpha: float, base: float = 2.0) -> float:
    """Arimoto–Rényi conditional entropy ``H_alpha(X|Y)`` for finite ``Y``."""
    alpha = _check_order(alpha)
    m = joint.masses
    cols = [m[:, y] for y in range(joint.y_size) if m[:, y].sum() > 0]
    if alpha == 1:
        h_bits = shannon_entropy(joint) - shannon_entropy(marginals(joint)[1])
    elif math.isinf(alpha):
        h_bits = -math.log2(math.fsum(c.max() for c in cols))
    elif alpha == 0:
        h_bits = math.log2(max(np.count_nonzero(c) for c in cols))
    else:
        # log of each column's alpha-norm, then log-sum-exp over columns
        logs = np.array([_log_sum_pow(c, alpha) / alpha for c in cols])
        top = logs.max()
        log_total = top + math.log(math.fsum(np.exp(logs - top)))
        h_bits = alpha / (1.0 - alpha) * log_total / math.log(2)
    if all(np.count_nonzero(c) == 1 for c in cols):
        return 0.0
    return h_bits if base == 2 else h_bits * math.log(2) / math.log(base)


def kl_divergence(q: AnyPmf, p: AnyPmf, base: float = 2.0) -> float:
    """``D(q || p)``; ``math.inf`` when ``q`` puts mass where ``p`` has none."""
    qm = np.asarray(q.masses)
    pm = np.asarray(p.masses)
    if qm.shape != pm.shape:
        raise InputError(f"shape mismatch: {qm.shape} vs {pm.shape}")
    qm, pm = qm.ravel(), pm.ravel()
    mask = qm > 0
    if np.any(pm[mask] == 0):
        return math.inf
    d_bits = math.fsum(qm[mask] * np.log2(qm[mask] / pm[mask]))
    d_bits = max(d_bits, 0.0)
    return d_bits if base == 2 else d_bits * math.log(2) / math.log(base)
