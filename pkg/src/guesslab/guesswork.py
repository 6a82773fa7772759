"""Exact guessing moments by enumeration, for one- and two-stage guessing.

Sequences over ``[0..k-1]^n`` are indexed lexicographically (first
position most significant), which is also the tie-break inside every
guessing order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CapExceededError, InputError
from .pmf import Pmf, arimoto_conditional_entropy, renyi_entropy
from .reduction import MergeMap, apply_map, beta_star, huffman_reduce, joint_of_map, reduce_pmf

DEFAULT_CAP = 2**24
_CHUNK = 1 << 20


def _check_rho(rho: float) -> float:
    rho = float(rho)
    if not rho > 0 or math.isinf(rho):
        raise InputError(f"rho must be a positive finite number, got {rho}")
    return rho


def _check_n(n: int) -> int:
    if int(n) != n or n < 1:
        raise InputError(f"n must be a positive integer, got {n}")
    return int(n)


def _check_cap(k: int, n: int, cap: int) -> None:
    if k**n > cap:
        raise CapExceededError(f"{k}^{n} = {k**n} sequences exceed the enumeration cap {cap}")


@dataclass(frozen=True)
class MomentResult:
    rho: float
    n: int
    value: float

    @property
    def log2_value_over_n(self) -> float:
        return math.log2(self.value) / self.n


@dataclass(frozen=True)
class PowerSumBounds:
    """Constants with ``s1 * sum(a**rho) <= sum(a)**rho <= s2 * sum(a**rho)``."""

    k: int
    rho: float
    s1: float
    s2: float

    def evaluate(self, a) -> tuple[float, float, float]:
        """Return ``(s1 * sum(a**rho), sum(a)**rho, s2 * sum(a**rho))`` for ``len(a) <= k``."""
        a = np.asarray(a, dtype=float)
        if a.size > self.k or np.any(a < 0):
            raise InputError(f"need at most {self.k} non-negative terms")
        power_sum = math.fsum(a**self.rho)
        return self.s1 * power_sum, math.fsum(a) ** self.rho, self.s2 * power_sum


def power_sum_bounds(k: int, rho: float) -> PowerSumBounds:
    if k < 1:
        raise InputError("k must be >= 1")
    rho = _check_rho(rho)
    c = float(k) ** (rho - 1)
    if rho >= 1:
        return PowerSumBounds(k, rho, 1.0, c)
    return PowerSumBounds(k, rho, c, 1.0)


def sequence_probabilities(masses, n: int, cap: int = DEFAULT_CAP) -> np.ndarray:
    """Product probabilities of all ``k**n`` sequences in lexicographic order."""
    masses = np.asarray(masses, dtype=float)
    n = _check_n(n)
    _check_cap(masses.size, n, cap)
    probs = masses
    for _ in range(n - 1):
        probs = np.multiply.outer(probs, masses).ravel()
    return probs


@dataclass(frozen=True, eq=False)
class GuessOrder:
    """Descending-probability ranking of ``[0..k-1]^n``, ties broken lexicographically."""

    masses: np.ndarray
    n: int
    cap: int = DEFAULT_CAP

    @property
    def alphabet_size(self) -> int:
        return int(np.asarray(self.masses).size)

    def order(self) -> np.ndarray:
        """Lexicographic indices of the sequences, in guessing order."""
        probs = sequence_probabilities(self.masses, self.n, self.cap)
        return np.argsort(-probs, kind="stable")

    def ranks(self) -> np.ndarray:
        """``ranks[i]`` is the 1-based guess number of the sequence with lex index ``i``."""
        order = self.order()
        ranks = np.empty(order.size, dtype=np.int64)
        ranks[order] = np.arange(1, order.size + 1)
        return ranks

    def sequence(self, index: int) -> tuple[int, ...]:
        """Decode a lexicographic index into a tuple of 0-based symbols."""
        k = self.alphabet_size
        digits = []
        for _ in range(self.n):
            index, d = divmod(index, k)
            digits.append(d)
        return tuple(reversed(digits))


def guess_order(p: Pmf, n: int, cap: int = DEFAULT_CAP) -> GuessOrder:
    return GuessOrder(p.masses, _check_n(n), cap)


def _weighted_rank_moment(sorted_probs: np.ndarray, rho: float, offset: float = 0.0) -> list[float]:
    """Partial sums of ``sorted_probs[i] * (offset + i + 1)**rho``, chunked."""
    parts = []
    for start in range(0, sorted_probs.size, _CHUNK):
        chunk = sorted_probs[start : start + _CHUNK]
        ranks = np.arange(start + 1, start + 1 + chunk.size, dtype=float) + offset
        parts.append(float(np.dot(chunk, ranks**rho)))
    return parts


def guess_moment(p: Pmf, n: int, rho: float, cap: int = DEFAULT_CAP) -> MomentResult:
    """Exact ``E[g(X^n)**rho]`` under the optimal (descending-probability) order."""
    rho = _check_rho(rho)
    n = _check_n(n)
    probs = np.sort(sequence_probabilities(p.masses, n, cap))[::-1]
    return MomentResult(rho, n, math.fsum(_weighted_rank_moment(probs, rho)))


def _symbol_count_keys(m: int, n: int) -> np.ndarray:
    """For each lex index of ``[0..m-1]^n``, an integer encoding its symbol counts."""
    weights = (n + 1) ** np.arange(m, dtype=np.int64)
    keys = weights
    for _ in range(n - 1):
        keys = np.add.outer(keys, weights).ravel()
    return keys


def _decode_counts(key: int, m: int, n: int) -> list[int]:
    counts = []
    for _ in range(m):
        key, c = divmod(key, n + 1)
        counts.append(c)
    return counts


def two_stage_moment(p: Pmf, f: MergeMap, n: int, rho: float, cap: int = DEFAULT_CAP) -> MomentResult:
    """Exact ``E[(g_Y(Y^n) + g_{X|Y}(X^n|Y^n))**rho]`` with ``Y_i = f(X_i)``.

    Stage 1 guesses ``Y^n`` in descending ``P_{Y^n}`` order; Stage 2 guesses
    only sequences in the fiber of the revealed ``y^n``, in descending
    posterior order. Fibers are enumerated per ``y``-composition, so the
    full ``X^n`` space is never materialized at once.
    """
    rho = _check_rho(rho)
    n = _check_n(n)
    _check_cap(p.support_size, n, cap)
    qy = apply_map(p, f)
    m = f.m
    y_ranks = GuessOrder(qy.masses, n, cap).ranks()
    fibers = [p.masses[f.index_array() == j] for j in range(m)]
    keys = _symbol_count_keys(m, n)
    by_key = np.argsort(keys, kind="stable")
    uniq, starts = np.unique(keys[by_key], return_index=True)
    bounds = list(starts) + [keys.size]
    parts: list[float] = []
    for key, lo, hi in zip(uniq.tolist(), bounds[:-1], bounds[1:]):
        counts = _decode_counts(key, m, n)
        # joint probabilities P(x^n) of one fiber; every y with these counts shares them
        fiber = np.array([1.0])
        for j, c in enumerate(counts):
            for _ in range(c):
                fiber = np.multiply.outer(fiber, fibers[j]).ravel()
        fiber = np.sort(fiber)[::-1]
        fiber = fiber[fiber > 0]
        if fiber.size == 0:
            continue
        stage1 = np.sort(y_ranks[by_key[lo:hi]]).astype(float)
        step = max(1, _CHUNK // fiber.size)
        inner = np.arange(1, fiber.size + 1, dtype=float)
        for start in range(0, stage1.size, step):
            total = stage1[start : start + step, None] + inner[None, :]
            parts.append(float(np.sum(total**rho @ fiber)))
    return MomentResult(rho, n, math.fsum(parts))


def arikan_sandwich(entropy_bits: float, n: int, rho: float, alphabet: int) -> tuple[float, float]:
    """Bounds on ``E[g^rho]`` for ``n`` i.i.d. symbols from an ``alphabet``-ary source.

    ``entropy_bits`` is the order-``1/(1+rho)`` Rényi entropy per symbol.
    """
    if entropy_bits < 0:
        raise InputError("entropy must be non-negative")
    rho = _check_rho(rho)
    upper = 2.0 ** (n * rho * entropy_bits)
    lower = (1.0 + n * math.log(alphabet)) ** (-rho) * upper
    return lower, upper


@dataclass(frozen=True)
class TwoStageBounds:
    """Non-asymptotic brackets on the two-stage moment.

    ``lower``/``upper`` use ``H(f(X))`` and ``H(X|f(X))`` directly; the
    ``huffman_*`` pair is present only when ``f`` is the Huffman-merge map and
    replaces ``H(f(X))`` by the surrogate entropy.
    """

    lower: float
    upper: float
    huffman_lower: float | None = None
    huffman_upper: float | None = None


def two_stage_moment_bounds(p: Pmf, f: MergeMap, n: int, rho: float) -> TwoStageBounds:
    rho = _check_rho(rho)
    n = _check_n(n)
    alpha = 1.0 / (1.0 + rho)
    k = p.support_size
    split = power_sum_bounds(2, rho)
    poly = (1.0 + n * math.log(k)) ** (-rho)
    h_y = renyi_entropy(apply_map(p, f), alpha)
    h_x_given_y = arimoto_conditional_entropy(joint_of_map(p, f), alpha)
    stage2 = 2.0 ** (n * rho * h_x_given_y)
    generic = 2.0 ** (n * rho * h_y) + stage2
    lower, upper = split.s1 * poly * generic, split.s2 * generic
    if f != huffman_reduce(p, f.m)[0]:
        return TwoStageBounds(lower, upper)
    a_m = renyi_entropy(reduce_pmf(p, f.m), alpha)
    h_lower = split.s1 * poly * (2.0 ** (n * (rho * a_m - beta_star())) + stage2)
    h_upper = split.s2 * (2.0 ** (n * rho * a_m) + stage2)
    return TwoStageBounds(lower, upper, h_lower, h_upper)
