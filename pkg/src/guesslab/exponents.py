"""Guessing exponents: closed forms, Huffman-map certificates and the variational rate.

All exponents are growth rates of ``log2`` of a guessing moment per symbol.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import InputError
from .guesswork import _check_rho
from .pmf import (
    JointPmf,
    Pmf,
    arimoto_conditional_entropy,
    marginals,
    renyi_entropy,
    shannon_entropy,
)
from .reduction import MergeMap, apply_map, beta_star, huffman_reduce, joint_of_map, reduce_pmf

# comparisons between a_m and b_m at exact ties (e.g. uniform sources)
TIE_TOL = 1e-12
MAX_CELLS = 16
GRID_BUDGET = 250_000
DEFAULT_SEEDS = 10
REFINE_HALVINGS = 40
_MAX_MOVES_PER_STEP = 500


@dataclass
class ExponentReport:
    value: float
    lower: float
    upper: float
    witness: Pmf | JointPmf | None = None
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        witness = None
        if isinstance(self.witness, (Pmf, JointPmf)):
            witness = self.witness.masses.tolist()
        return {"value": self.value, "lower": self.lower, "upper": self.upper,
                "witness": witness, **self.details}


def e1(p: Pmf, rho: float) -> float:
    """Single-stage exponent ``rho * H_{1/(1+rho)}(X)``."""
    rho = _check_rho(rho)
    return rho * renyi_entropy(p, 1.0 / (1.0 + rho))


def e2(p: Pmf, f: MergeMap, rho: float) -> float:
    """Two-stage exponent when ``Y = f(X)`` must be found first."""
    rho = _check_rho(rho)
    alpha = 1.0 / (1.0 + rho)
    return rho * max(renyi_entropy(apply_map(p, f), alpha),
                     arimoto_conditional_entropy(joint_of_map(p, f), alpha))


def ab_sequences(p: Pmf, alpha: float) -> tuple[np.ndarray, np.ndarray]:
    """``a[m-1] = H_alpha(X~_m)`` and ``b[m-1] = H_alpha(X | f*_m(X))`` for ``m = 1..|X|``."""
    k = p.support_size
    a = np.array([renyi_entropy(reduce_pmf(p, m), alpha) for m in range(1, k + 1)])
    b = np.array([arimoto_conditional_entropy(joint_of_map(p, huffman_reduce(p, m)[0]), alpha)
                  for m in range(1, k + 1)])
    return a, b


def _strip_zeros(p: Pmf) -> Pmf:
    return Pmf(p.masses[p.masses > 0])


def m_star_rho(p: Pmf, rho: float) -> int:
    """Smallest ``m >= 2`` with ``a_m >= b_m`` at order ``1/(1+rho)`` (zero masses dropped)."""
    rho = _check_rho(rho)
    p = _strip_zeros(p)
    if p.support_size < 2:
        raise InputError("need at least two symbols of positive mass")
    a, b = ab_sequences(p, 1.0 / (1.0 + rho))
    for m in range(2, p.support_size + 1):
        if a[m - 1] >= b[m - 1] - TIE_TOL:
            return m
    return p.support_size


def e2_bounds_huffman(p: Pmf, m: int, rho: float) -> ExponentReport:
    """Exponent of two-stage guessing with ``f*_m`` and its closed-form certificates.

    ``value`` is the exact exponent; ``lower``/``upper`` come from the case
    split on ``m*_rho``. ``details["margin"]`` is ``E1 - upper``.
    """
    rho = _check_rho(rho)
    p = _strip_zeros(p)
    k = p.support_size
    if not 2 <= m <= k - 1:
        raise InputError(f"m={m} outside [2, {k - 1}]")
    alpha = 1.0 / (1.0 + rho)
    a_m = renyi_entropy(reduce_pmf(p, m), alpha)
    f = huffman_reduce(p, m)[0]
    b_m = arimoto_conditional_entropy(joint_of_map(p, f), alpha)
    m_star = m_star_rho(p, rho)
    if m < m_star:
        lower = upper = rho * b_m
    else:
        lower, upper = rho * a_m - beta_star(), rho * a_m
    value = e2(p, f, rho)
    single = e1(p, rho)
    details = {"m": m, "m_star": m_star, "a_m": a_m, "b_m": b_m, "e1": single,
               "margin": single - upper, "map": list(f.labels)}
    return ExponentReport(value, lower, upper, None, details)


# --- variational exponents -------------------------------------------------


def _entropy_rows(a: np.ndarray) -> np.ndarray:
    """Shannon entropy (bits) of each row of a non-negative 2-d array."""
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(a > 0, a * np.log2(np.where(a > 0, a, 1.0)), 0.0)
    return -terms.sum(axis=1)


def _divergence_rows(q: np.ndarray, log2_p: np.ndarray) -> np.ndarray:
    """``D(q || p)`` per row of ``q``; ``q`` lives on the support of ``p`` only."""
    return -_entropy_rows(q) - q @ log2_p


def _two_stage_rate_rows(q: np.ndarray, shape: tuple[int, int], rho: float) -> np.ndarray:
    cube = q.reshape(-1, *shape)
    h_x = _entropy_rows(cube.sum(axis=2))
    h_y = _entropy_rows(cube.sum(axis=1))
    h_x_given_y = _entropy_rows(q) - h_y
    return rho * np.minimum(h_x, np.maximum(h_y, h_x_given_y))


def two_stage_rate(q: JointPmf, rho: float) -> float:
    """``rho * min{H(Q_X), max{H(Q_Y), H(Q_{X|Y})}}`` in bits.

    This is the guessing exponent when ``(X^n, Y^n)`` is uniform on the type
    class of ``q``.
    """
    rho = _check_rho(rho)
    qx, qy = marginals(q)
    h_y = shannon_entropy(qy)
    return rho * min(shannon_entropy(qx), max(h_y, shannon_entropy(q) - h_y))


def default_resolution(cells: int) -> int:
    """Largest ``r <= 60`` whose simplex grid has at most ``GRID_BUDGET`` points."""
    r = 60
    while r > 1 and math.comb(r + cells - 1, cells - 1) > GRID_BUDGET:
        r -= 1
    return r


def simplex_grid(cells: int, resolution: int) -> np.ndarray:
    """All points of the probability simplex with coordinates in ``(1/r) Z``."""
    if cells == 1:
        return np.ones((1, 1))
    bars = np.array(list(itertools.combinations(range(resolution + cells - 1), cells - 1)))
    padded = np.hstack([np.full((bars.shape[0], 1), -1), bars,
                        np.full((bars.shape[0], 1), resolution + cells - 1)])
    return (np.diff(padded, axis=1) - 1) / resolution


def _binary_entropy(t: float) -> float:
    if t <= 0 or t >= 1:
        return 0.0
    return -t * math.log2(t) - (1 - t) * math.log2(1 - t)


def _continuity(tv: float, size: int) -> float:
    """Bound on ``|H(Q) - H(Q')|`` for total variation ``tv`` on ``size`` points."""
    if size <= 1:
        return 0.0
    bound = tv * math.log2(size - 1) + _binary_entropy(min(tv, 0.5))
    return min(bound, math.log2(size))


def _refine(objective: Callable[[np.ndarray], np.ndarray], start: np.ndarray, step: float,
            halvings: int) -> tuple[np.ndarray, float]:
    """Pairwise mass-transfer pattern search on the simplex, halving the step when stuck."""
    d = start.size
    pairs = [(i, j) for i in range(d) for j in range(d) if i != j]
    src = np.array([i for i, _ in pairs])
    dst = np.array([j for _, j in pairs])
    best = start.copy()
    best_val = float(objective(best[None, :])[0])
    for _ in range(halvings):
        for _ in range(_MAX_MOVES_PER_STEP):
            moved = np.minimum(step, best[src])
            cand = np.repeat(best[None, :], len(pairs), axis=0)
            rows = np.arange(len(pairs))
            cand[rows, src] -= moved
            cand[rows, dst] += moved
            np.clip(cand, 0.0, None, out=cand)
            vals = objective(cand)
            top = int(np.argmax(vals))
            if not vals[top] > best_val:
                break
            best, best_val = cand[top], float(vals[top])
        step /= 2
    return best, best_val


def _maximize(objective, cells: int, resolution: int, seeds: int) -> tuple[np.ndarray, float, int]:
    grid = simplex_grid(cells, resolution)
    vals = objective(grid)
    top = np.argsort(-vals, kind="stable")[:seeds]
    found = []
    for idx in top:
        q, val = _refine(objective, grid[idx], 1.0 / resolution, REFINE_HALVINGS)
        found.append((val, tuple(q), q))
    # max value, lexicographic tie-break on the point
    found.sort(key=lambda item: (-item[0], item[1]))
    return found[0][2], found[0][0], grid.shape[0]


def _check_cells(cells: int, resolution: int | None) -> int:
    if cells > MAX_CELLS:
        raise InputError(f"{cells} support cells exceed the optimizer cap {MAX_CELLS}")
    r = default_resolution(cells) if resolution is None else int(resolution)
    if r < 1:
        raise InputError("resolution must be a positive integer")
    return r


def variational_exponent(p: JointPmf, rho: float, resolution: int | None = None,
                         seeds: int = DEFAULT_SEEDS) -> ExponentReport:
    """Search ``sup_Q rho*min{H(Q_X), max{H(Q_Y), H(Q_{X|Y})}} - D(Q||P)``.

    Only ``Q`` supported inside ``supp P`` are searched (elsewhere ``D`` is
    infinite). ``lower`` is the objective at the returned witness;
    ``upper`` adds a continuity slack valid for the grid resolution, which
    is conservative and usually loose.
    """
    rho = _check_rho(rho)
    flat = p.masses.ravel()
    support = np.flatnonzero(flat > 0)
    r = _check_cells(support.size, resolution)
    log2_p = np.log2(flat[support])

    def objective(q_supp: np.ndarray) -> np.ndarray:
        full = np.zeros((q_supp.shape[0], flat.size))
        full[:, support] = q_supp
        return _two_stage_rate_rows(full, p.shape, rho) - _divergence_rows(q_supp, log2_p)

    q_best, _, grid_points = _maximize(objective, support.size, r, seeds)
    full = np.zeros(flat.size)
    full[support] = q_best
    witness = JointPmf(full.reshape(p.shape) / full.sum())
    # objective recomputed on the validated witness so that lower == objective(witness)
    witness_supp = witness.masses.ravel()[support]
    lower = float(objective(witness_supp[None, :])[0])
    tv = support.size / (2.0 * r)
    omega_xy = _continuity(tv, support.size)
    omega_x = _continuity(tv, p.x_size)
    omega_y = _continuity(tv, p.y_size)
    slack = (rho * max(omega_x, omega_y, omega_xy + omega_y) + omega_xy
             + tv * float(log2_p.max() - log2_p.min()))
    details = {"resolution": r, "grid_points": grid_points, "slack": slack}
    return ExponentReport(lower, lower, lower + slack, witness, details)


def single_stage_variational(p: Pmf, rho: float, resolution: int | None = None,
                             seeds: int = DEFAULT_SEEDS) -> ExponentReport:
    """Search ``sup_Q rho*H(Q) - D(Q||P)``; the optimum equals :func:`e1`."""
    rho = _check_rho(rho)
    support = np.flatnonzero(p.masses > 0)
    r = _check_cells(support.size, resolution)
    log2_p = np.log2(p.masses[support])

    def objective(q_supp: np.ndarray) -> np.ndarray:
        return rho * _entropy_rows(q_supp) - _divergence_rows(q_supp, log2_p)

    q_best, _, grid_points = _maximize(objective, support.size, r, seeds)
    full = np.zeros(p.support_size)
    full[support] = q_best
    witness = Pmf(full / full.sum())
    lower = float(objective(witness.masses[support][None, :])[0])
    tv = support.size / (2.0 * r)
    slack = (rho + 1) * _continuity(tv, support.size) + tv * float(log2_p.max() - log2_p.min())
    details = {"resolution": r, "grid_points": grid_points, "slack": slack}
    return ExponentReport(lower, lower, lower + slack, witness, details)
