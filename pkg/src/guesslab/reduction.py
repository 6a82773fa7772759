"""Alphabet reduction: Huffman-merge descriptions and the reduced surrogate PMF.

``huffman_reduce`` builds the description ``f*_m`` by repeatedly merging
the two least likely nodes. ``reduce_pmf`` builds the PMF of the surrogate
variable whose Rényi entropy bounds that of ``f*_m(X)`` from above, with
``v_gap(alpha)`` as the worst-case shortfall.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .pmf import JointPmf, Pmf


@dataclass(frozen=True)
class MergeMap:
    """A surjective map ``[1..len(labels)] -> [1..m]`` (labels are 1-based)."""

    labels: tuple[int, ...]
    m: int

    def __post_init__(self):
        labels = tuple(int(v) for v in self.labels)
        object.__setattr__(self, "labels", labels)
        if not labels:
            raise InputError("merge map must be non-empty")
        if self.m < 1 or any(not 1 <= v <= self.m for v in labels):
            raise InputError(f"labels must lie in [1, {self.m}]")
        if len(set(labels)) != self.m:
            raise InputError(f"merge map is not surjective onto [1, {self.m}]")

    @classmethod
    def from_labels(cls, labels) -> "MergeMap":
        labels = tuple(int(v) for v in labels)
        return cls(labels, max(labels))

    @classmethod
    def identity(cls, k: int) -> "MergeMap":
        return cls(tuple(range(1, k + 1)), k)

    @classmethod
    def constant(cls, k: int) -> "MergeMap":
        return cls((1,) * k, 1)

    def __len__(self) -> int:
        return len(self.labels)

    def index_array(self) -> np.ndarray:
        """0-based labels as an integer array."""
        return np.asarray(self.labels, dtype=np.intp) - 1

    def to_json(self) -> dict:
        return {"m": self.m, "map": list(self.labels)}

    @classmethod
    def from_json(cls, obj: dict) -> "MergeMap":
        try:
            labels = obj["map"]
        except (KeyError, TypeError):
            raise InputError('merge map JSON needs a "map" key') from None
        m = obj.get("m", max(labels) if labels else 0)
        return cls(tuple(labels), int(m))


def _check_map(p: Pmf, f: MergeMap) -> None:
    if len(f) != p.support_size:
        raise InputError(f"map has {len(f)} entries but pmf has {p.support_size} symbols")


def apply_map(p: Pmf, f: MergeMap) -> Pmf:
    """Law of ``f(X)`` for ``X ~ p``."""
    _check_map(p, f)
    return Pmf(np.bincount(f.index_array(), weights=p.masses, minlength=f.m))


def joint_of_map(p: Pmf, f: MergeMap) -> JointPmf:
    """Law of the pair ``(X, f(X))``."""
    _check_map(p, f)
    j = np.zeros((p.support_size, f.m))
    j[np.arange(p.support_size), f.index_array()] = p.masses
    return JointPmf(j)


def huffman_reduce(p: Pmf, m: int) -> tuple[MergeMap, Pmf]:
    """Merge the two least likely nodes until ``m`` nodes remain.

    Ties are broken towards the smaller node index and a merged node keeps
    the smaller index of its two parents; output labels follow the order of
    those surviving indices. Returns ``(f*_m, law of f*_m(X))``.
    """
    k = p.support_size
    if not 1 <= m <= k:
        raise InputError(f"m={m} outside [1, {k}]")
    heap = [(float(mass), i) for i, mass in enumerate(p.masses)]
    heapq.heapify(heap)
    members = {i: [i] for i in range(k)}
    while len(heap) > m:
        mass_a, a = heapq.heappop(heap)
        mass_b, b = heapq.heappop(heap)
        keep, drop = min(a, b), max(a, b)
        members[keep].extend(members.pop(drop))
        heapq.heappush(heap, (mass_a + mass_b, keep))
    labels = [0] * k
    for label, rep in enumerate(sorted(members), start=1):
        for x in members[rep]:
            labels[x] = label
    f = MergeMap(tuple(labels), m)
    return f, apply_map(p, f)


def reduce_pmf(p: Pmf, m: int) -> Pmf:
    """PMF of the surrogate ``X~_m`` on ``[1..m]``, in non-increasing order.

    The input need not be sorted; it is sorted descending first, so for
    ``m == len(p)`` the result is ``p`` in sorted order.
    """
    k = p.support_size
    if not 1 <= m <= k:
        raise InputError(f"m={m} outside [1, {k}]")
    q = p.sorted_desc()
    if m == 1:
        return Pmf([1.0])
    if m == k:
        return Pmf(q)
    if q[0] < 1.0 / m:
        return Pmf(np.full(m, 1.0 / m))
    # tails[i] = sum of q[i:], 0-based
    tails = [math.fsum(q[i:]) for i in range(k + 1)]
    m_star = 1
    for i in range(m - 1, 0, -1):
        if q[i - 1] >= tails[i] / (m - i):
            m_star = i
            break
    tail_mass = tails[m_star] / (m - m_star)
    return Pmf(np.concatenate([q[:m_star], np.full(m - m_star, tail_mass)]))


def _log2_abs_pow2_minus_1(t: float) -> float:
    """``log2|2**t - 1|`` without overflow for large ``t``."""
    if t > 0:
        return t + math.log2(-math.expm1(-t * math.log(2)))
    return math.log2(-math.expm1(t * math.log(2)))


def beta_star() -> float:
    """``log2(2 / (e ln 2))``, about 0.08607 bits."""
    return math.log2(2.0 / (math.e * math.log(2)))


def v_gap(alpha: float) -> float:
    """Gap ``v(alpha)`` in bits; increasing from 0 (alpha -> 0) to 1 (alpha -> inf)."""
    alpha = float(alpha)
    if not alpha > 0:
        raise InputError(f"alpha must be positive, got {alpha}")
    if math.isinf(alpha):
        return 1.0
    if alpha == 1:
        return beta_star()
    first = math.log2(abs(alpha - 1)) - 1.0 - _log2_abs_pow2_minus_1(alpha - 1)
    second = math.log2(alpha) - _log2_abs_pow2_minus_1(alpha)
    return first - alpha / (alpha - 1) * second
