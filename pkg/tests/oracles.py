"""Slow, independent reference computations used as test oracles.

Nothing here imports the numerical paths it is compared against.
"""

import itertools
import math
from fractions import Fraction


def seq_prob(masses, seq):
    return math.prod(masses[s] for s in seq)


def brute_guess_moment(masses, n, rho):
    probs = sorted((seq_prob(masses, s) for s in itertools.product(range(len(masses)), repeat=n)),
                   reverse=True)
    return math.fsum(p * (i + 1) ** rho for i, p in enumerate(probs))


def _ranking(items, prob):
    """1-based ranks: descending probability, ties in the given (lexicographic) order."""
    ordered = sorted(items, key=lambda s: -prob(s))
    return {s: i + 1 for i, s in enumerate(ordered)}


def brute_two_stage_moment(masses, labels, n, rho):
    """``labels`` are 0-based images f(x)."""
    m = max(labels) + 1
    py = [math.fsum(masses[x] for x in range(len(masses)) if labels[x] == j) for j in range(m)]
    y_rank = _ranking(list(itertools.product(range(m), repeat=n)), lambda y: seq_prob(py, y))
    groups = {}
    for x in itertools.product(range(len(masses)), repeat=n):
        groups.setdefault(tuple(labels[s] for s in x), []).append(x)
    total = []
    for y, xs in groups.items():
        x_rank = _ranking(xs, lambda x: seq_prob(masses, x))
        for x in xs:
            total.append(seq_prob(masses, x) * (y_rank[y] + x_rank[x]) ** rho)
    return math.fsum(total)


def type_class_members(counts):
    """All (x^n, y^n) pairs (0-based symbols) whose joint type is ``counts``."""
    cells = [(x, y) for x, row in enumerate(counts) for y, c in enumerate(row) for _ in range(c)]
    pairs = set(itertools.permutations(cells))
    return sorted((tuple(a for a, _ in p), tuple(b for _, b in p)) for p in pairs)


def brute_type_class_moment(counts, policy, rho):
    members = type_class_members(counts)
    if policy == "skip":
        xs = sorted({x for x, _ in members})
        rank = {x: i + 1 for i, x in enumerate(xs)}
        vals = [(1 + rank[x]) ** rho for x, _ in members]
    else:
        ys = sorted({y for _, y in members})
        y_rank = {y: i + 1 for i, y in enumerate(ys)}
        by_y = {}
        for x, y in members:
            by_y.setdefault(y, []).append(x)
        vals = []
        for y, xs in by_y.items():
            x_rank = {x: i + 1 for i, x in enumerate(sorted(xs))}
            vals.extend((y_rank[y] + x_rank[x]) ** rho for x in xs)
    return math.fsum(vals) / len(members)


def naive_huffman_merged(masses, m):
    """Sorted masses after merging the two smallest until ``m`` remain."""
    nodes = [Fraction(p).limit_denominator(10**12) for p in masses]
    while len(nodes) > m:
        nodes.sort()
        nodes = [nodes[0] + nodes[1]] + nodes[2:]
    return sorted((float(v) for v in nodes), reverse=True)


def arimoto_weighted_form(joint, alpha):
    """Conditional Rényi entropy via the P_Y-weighted per-column form, bits."""
    cols = list(zip(*joint))
    acc = 0.0
    for col in cols:
        py = sum(col)
        if py == 0:
            continue
        cond = [v / py for v in col if v > 0]
        h = math.log2(sum(c**alpha for c in cond)) / (1 - alpha)
        acc += py * 2 ** ((1 - alpha) / alpha * h)
    return alpha / (1 - alpha) * math.log2(acc)


def best_deterministic_entropy(masses, m):
    """max over all f: [k] -> [m] of H(f(X)), by exhaustion."""
    best = 0.0
    for f in itertools.product(range(m), repeat=len(masses)):
        img = [0.0] * m
        for x, y in enumerate(f):
            img[y] += masses[x]
        best = max(best, -math.fsum(v * math.log2(v) for v in img if v > 0))
    return best
