"""Densest mutually-consistent subset of an affinity matrix.

Relaxation in the style of maximum-consensus registration: maximize
u'Au / u'u over nonnegative u, driving mass off pairs whose joint
affinity is zero via a penalty homotopy, then round by thresholding at
half the peak component and polish with deterministic local moves. The
solver never enumerates subsets, so the exhaustive-search oracle used in
tests stays an independent check.
"""

from __future__ import annotations

import numpy as np

_MAX_ITERS = 200
_STEP_TOL = 1e-9
_GAIN_TOL = 1e-12


def _conflicts(matrix: np.ndarray) -> np.ndarray:
    """Boolean matrix of zero-affinity (mutually inconsistent) off-diagonal pairs."""
    bad = matrix <= 0.0
    np.fill_diagonal(bad, False)
    return bad


def _power_ascent(matrix: np.ndarray, bad: np.ndarray, u0: np.ndarray) -> np.ndarray:
    """Projected power ascent with an increasing penalty on active conflicts."""
    u = u0 / np.linalg.norm(u0)
    penalty = 1.0
    for _ in range(_MAX_ITERS):
        v = (matrix - penalty * bad) @ u
        np.maximum(v, 0.0, out=v)
        norm = np.linalg.norm(v)
        if norm < 1e-12:
            break
        v /= norm
        support = v > 1e-12
        if (bad & np.outer(support, support)).any():
            penalty *= 1.4
        if np.linalg.norm(v - u) < _STEP_TOL:
            u = v
            break
        u = v
    return u


def _round_solution(u: np.ndarray, bad: np.ndarray) -> list[int]:
    """Threshold at half the peak, then drop conflict members weakest-first."""
    peak = float(u.max())
    if peak <= 0.0:
        return []
    selected = [i for i in range(len(u)) if u[i] >= 0.5 * peak]
    selected.sort(key=lambda i: (-u[i], i))
    kept: list[int] = []
    for i in selected:
        if not any(bad[i, j] for j in kept):
            kept.append(i)
    return sorted(kept)


def _density(matrix: np.ndarray, subset) -> float:
    idx = np.asarray(sorted(subset), dtype=int)
    if idx.size == 0:
        return 0.0
    return float(matrix[np.ix_(idx, idx)].sum() / idx.size)


def _hill_climb(matrix: np.ndarray, bad: np.ndarray, subset: list[int]) -> list[int]:
    """Best-improvement add/remove/swap ascent on density, fully vectorized.

    Deterministic: at each round the single best-scoring move is taken,
    ties resolved by the numpy argmax convention (lowest index).
    """
    n = matrix.shape[0]
    mask = np.zeros(n, dtype=bool)
    mask[list(subset)] = True
    if not mask.any():
        return []
    neg_inf = -np.inf
    while True:
        members = np.flatnonzero(mask)
        k = members.size
        total = float(matrix[np.ix_(members, members)].sum())
        score = total / k
        coupling = matrix[:, members].sum(axis=1)       # sum of affinities into the set
        conflicts = bad[:, members].sum(axis=1)         # conflict count against the set

        # adding j: (total + 2 c_j + A_jj) / (k + 1), j compatible and outside
        add_scores = np.full(n, neg_inf)
        addable = (~mask) & (conflicts == 0)
        if addable.any():
            add_scores[addable] = (
                total + 2.0 * coupling[addable] + np.diag(matrix)[addable]
            ) / (k + 1)

        # removing i: (total - 2 c_i + A_ii) / (k - 1)
        remove_scores = np.full(n, neg_inf)
        if k > 1:
            remove_scores[mask] = (
                total - 2.0 * coupling[mask] + np.diag(matrix)[mask]
            ) / (k - 1)

        # swapping i -> j: remove i then add j, allowed when j's only conflict is i
        best_swap, best_swap_score = None, neg_inf
        if k >= 1:
            for i in members:
                base = total - 2.0 * coupling[i] + matrix[i, i]
                ok = (~mask) & ((conflicts == 0) | ((conflicts == 1) & bad[:, i]))
                if not ok.any():
                    continue
                gain = base + 2.0 * (coupling - matrix[:, i]) + np.diag(matrix)
                gain = np.where(ok, gain / k, neg_inf)
                j = int(np.argmax(gain))
                if gain[j] > best_swap_score:
                    best_swap, best_swap_score = (int(i), j), float(gain[j])

        move_scores = (float(add_scores.max()), float(remove_scores.max()), best_swap_score)
        best = max(move_scores)
        if best <= score + _GAIN_TOL:
            return sorted(int(i) for i in members)
        which = move_scores.index(best)
        if which == 0:
            mask[int(np.argmax(add_scores))] = True
        elif which == 1:
            mask[int(np.argmax(remove_scores))] = False
        else:
            i, j = best_swap
            mask[i] = False
            mask[j] = True


def solve_densest(matrix: np.ndarray) -> tuple[tuple[int, ...], float]:
    """Select the densest mutually-consistent index subset of an affinity matrix.

    Returns the selected indices (sorted) and the density u'Au / u'u of their
    indicator vector. An empty matrix yields an empty selection: the caller's
    no-match signal.
    """
    matrix = np.asarray(matrix, dtype=float)
    n = matrix.shape[0]
    if n == 0:
        return (), 0.0
    if n == 1:
        return (0,), float(matrix[0, 0])
    bad = _conflicts(matrix)

    seeds: list[list[int]] = []
    for start in (np.ones(n), *(np.eye(n)[i] for i in range(n))):
        u = _power_ascent(matrix, bad, start)
        seeds.append(_round_solution(u, bad))
    seeds.extend([i] for i in range(n))
    if n <= 20:
        for i in range(n):
            for j in range(i + 1, n):
                if not bad[i, j]:
                    seeds.append([i, j])

    best, best_score = [], -1.0
    seen: set[tuple[int, ...]] = set()
    for seed in seeds:
        if not seed:
            continue
        key = tuple(seed)
        if key in seen:
            continue
        seen.add(key)
        subset = _hill_climb(matrix, bad, seed)
        score = _density(matrix, subset)
        if score > best_score + _GAIN_TOL or (
            abs(score - best_score) <= _GAIN_TOL and tuple(subset) < tuple(best)
        ):
            best, best_score = subset, score
    return tuple(best), best_score
