"""Joint types of denominator ``n`` and guessing within a type class."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import CapExceededError, InputError
from .guesswork import DEFAULT_CAP, MomentResult, _check_rho
from .pmf import JointPmf

TYPE_ENUMERATION_CAP = 10**7


def multinomial(counts: Sequence[int]) -> int:
    """``sum(counts)! / prod(c!)`` as an exact integer."""
    total, out = 0, 1
    for c in counts:
        total += int(c)
        out *= math.comb(total, int(c))
    return out


@dataclass(frozen=True, eq=False)
class TypeDescriptor:
    """Integer counts over ``X x Y`` summing to ``n`` (rows index x, columns y)."""

    counts: np.ndarray

    def __post_init__(self):
        arr = np.array(self.counts)
        if arr.ndim != 2 or arr.size == 0:
            raise InputError("type counts must be a non-empty matrix")
        if not np.all(np.equal(np.mod(arr, 1), 0)) or np.any(arr < 0):
            raise InputError("type counts must be non-negative integers")
        arr = arr.astype(np.int64)
        if arr.sum() < 1:
            raise InputError("type counts must sum to n >= 1")
        arr.setflags(write=False)
        object.__setattr__(self, "counts", arr)

    @property
    def n(self) -> int:
        return int(self.counts.sum())

    @property
    def shape(self) -> tuple[int, int]:
        return int(self.counts.shape[0]), int(self.counts.shape[1])

    def key(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(int(c) for c in row) for row in self.counts)

    def __eq__(self, other):
        return isinstance(other, TypeDescriptor) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self) -> str:
        return f"TypeDescriptor({self.counts.tolist()})"

    def joint(self) -> JointPmf:
        return JointPmf(self.counts / self.n)

    def x_counts(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    def y_counts(self) -> np.ndarray:
        return self.counts.sum(axis=0)

    def to_json(self) -> dict:
        return {"counts": self.counts.tolist(), "n": self.n}


class StageOneSet(str, enum.Enum):
    """Stage-1 guess list: skip it (one wasted guess) or guess the whole ``Y`` type class."""

    SKIP = "skip"
    FULL_Y = "full-y"

    @classmethod
    def parse(cls, text: str) -> "StageOneSet":
        aliases = {"skip": cls.SKIP, "full-y": cls.FULL_Y, "fully": cls.FULL_Y, "full_y": cls.FULL_Y}
        try:
            return aliases[text.lower()]
        except KeyError:
            raise InputError(f"unknown stage-one policy {text!r}") from None


def _compositions(n: int, cells: int) -> Iterator[tuple[int, ...]]:
    if cells == 1:
        yield (n,)
        return
    for first in range(n, -1, -1):
        for rest in _compositions(n - first, cells - 1):
            yield (first,) + rest


def enumerate_types(n: int, x_size: int, y_size: int, cap: int = TYPE_ENUMERATION_CAP) -> list[TypeDescriptor]:
    """All denominator-``n`` joint types on an ``x_size x y_size`` alphabet."""
    if n < 1 or x_size < 1 or y_size < 1:
        raise InputError("n, x_size and y_size must be positive")
    cells = x_size * y_size
    if (n + 1) ** (cells - 1) > cap:
        raise CapExceededError(f"(n+1)^(|X||Y|-1) = {(n + 1) ** (cells - 1)} exceeds cap {cap}")
    return [
        TypeDescriptor(np.array(c).reshape(x_size, y_size)) for c in _compositions(n, cells)
    ]


def type_class_size(t: TypeDescriptor) -> int:
    return multinomial(t.counts.ravel())


def marginal_class_sizes(t: TypeDescriptor) -> tuple[int, int, int]:
    """``(|T(Q_X)|, |T(Q_Y)|, |T(Q_{X|Y} | y^n)|)``; the last is the same for every ``y^n``."""
    conditional = 1
    for col in t.counts.T:
        conditional *= multinomial(col)
    return multinomial(t.x_counts()), multinomial(t.y_counts()), conditional


def empirical_type(x_seq: Sequence[int], y_seq: Sequence[int], x_size: int | None = None,
                   y_size: int | None = None) -> TypeDescriptor:
    """Joint type of two equal-length sequences of 1-based symbols."""
    if len(x_seq) != len(y_seq):
        raise InputError(f"length mismatch: {len(x_seq)} vs {len(y_seq)}")
    if not x_seq:
        raise InputError("sequences must be non-empty")
    x_size = x_size or max(x_seq)
    y_size = y_size or max(y_seq)
    counts = np.zeros((x_size, y_size), dtype=np.int64)
    for a, b in zip(x_seq, y_seq):
        if not (1 <= a <= x_size and 1 <= b <= y_size):
            raise InputError(f"symbol pair ({a}, {b}) outside the alphabet")
        counts[a - 1, b - 1] += 1
    return TypeDescriptor(counts)


def delta_n(n: int, x_size: int, y_size: int) -> float:
    """``(|X||Y| - 1) log2(n + 1) / n``."""
    if n < 1:
        raise InputError("n must be >= 1")
    return (x_size * y_size - 1) * math.log2(n + 1) / n


def type_probability(t: TypeDescriptor, p: JointPmf) -> float:
    """Probability that ``n`` i.i.d. draws from ``p`` have joint type ``t``."""
    if t.shape != p.shape:
        raise InputError(f"shape mismatch: {t.shape} vs {p.shape}")
    counts = t.counts.ravel()
    masses = p.masses.ravel()
    used = counts > 0
    if np.any(masses[used] == 0):
        return 0.0
    log_p = math.log(type_class_size(t)) + math.fsum(counts[used] * np.log(masses[used]))
    return math.exp(log_p)


def _mean_power_of_uniform_sum(n1: int, n2: int, rho: float) -> float:
    """``E[(I + J)**rho]`` for independent ``I ~ U[1..n1]`` and ``J ~ U[1..n2]``."""
    s = np.arange(2, n1 + n2 + 1, dtype=np.int64)
    ways = np.minimum.reduce([s - 1, np.full_like(s, min(n1, n2)), n1 + n2 + 1 - s])
    terms = ways.astype(float) * s.astype(float) ** rho
    return math.fsum(terms) / (n1 * n2)


def type_class_two_stage_moment(t: TypeDescriptor, policy: StageOneSet | str, rho: float,
                                cap: int = DEFAULT_CAP) -> MomentResult:
    """Exact two-stage moment when ``(X^n, Y^n)`` is uniform on the type class of ``t``.

    All members of a (conditional) type class are equiprobable, so every
    guessing order within one is optimal; ranks are uniform on ``[1..N]``.
    """
    rho = _check_rho(rho)
    if isinstance(policy, str):
        policy = StageOneSet.parse(policy)
    size = type_class_size(t)
    if size > cap:
        raise CapExceededError(f"type class of size {size} exceeds the enumeration cap {cap}")
    n_x, n_y, n_x_given_y = marginal_class_sizes(t)
    if policy is StageOneSet.SKIP:
        value = _mean_power_of_uniform_sum(1, n_x, rho)
    else:
        value = _mean_power_of_uniform_sum(n_y, n_x_given_y, rho)
    return MomentResult(rho, t.n, value)
