"""
Discrete optimal transport between quantized measures.

- ``discrete_wasserstein``: exact transportation simplex (northwest-corner
  start, MODI potentials, Bland's entering rule) on cost d(A_i, B_j)^p
- ``circle_w1``: closed-form W1 on the circle (cut the circle, subtract
  the weighted median of the CDF difference)
- ``padded_union_compare``: both measures re-expressed on the union of
  their supports before solving
"""
from __future__ import annotations

import logging
import math
from collections import deque
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .constant_curvature import TWO_PI, normalize_angle
from .errors import DataError, ManifoldMismatchError, NumericalError, UsageError
from .manifold_core import ManifoldKind
from .quantization import DISTINCT_TOL, Codebook, QuantizedMeasure

logger = logging.getLogger(__name__)

MAX_ATOMS = 256
MARGINAL_TOL = 1e-9
MAX_PIVOTS = 100_000


@dataclass
class TransportPlan:
    """Optimal coupling of ``source`` and ``target``."""

    matrix: np.ndarray
    source: QuantizedMeasure
    target: QuantizedMeasure
    cost: float
    p: float = 1.0
    pivots: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "cost": self.cost,
            "p": self.p,
            "rows": self.source.n,
            "cols": self.target.n,
            "plan": self.matrix.tolist(),
            "pivots": self.pivots,
        }


# =============================================================================
# TRANSPORTATION SIMPLEX
# =============================================================================

def _northwest_corner(a: np.ndarray, b: np.ndarray) -> Tuple[np.ndarray, List[Tuple[int, int]]]:
    m, n = len(a), len(b)
    x = np.zeros((m, n))
    ra, rb = a.copy(), b.copy()
    basis = []
    i = j = 0
    while True:
        q = min(ra[i], rb[j])
        x[i, j] = q
        basis.append((i, j))
        ra[i] -= q
        rb[j] -= q
        if i == m - 1 and j == n - 1:
            break
        # staircase: exactly m + n - 1 cells
        if j == n - 1 or (i < m - 1 and ra[i] <= rb[j]):
            i += 1
        else:
            j += 1
    return x, basis


def _adjacency(m: int, n: int, basis: List[Tuple[int, int]]) -> List[List[int]]:
    """Basis tree over nodes 0..m-1 (rows) and m..m+n-1 (columns)."""
    adj: List[List[int]] = [[] for _ in range(m + n)]
    for i, j in basis:
        adj[i].append(m + j)
        adj[m + j].append(i)
    return adj


def _potentials(cost: np.ndarray, adj: List[List[int]]) -> Tuple[np.ndarray, np.ndarray]:
    m, n = cost.shape
    pot = np.full(m + n, np.nan)
    pot[0] = 0.0
    queue = deque([0])
    while queue:
        node = queue.popleft()
        for nxt in adj[node]:
            if np.isnan(pot[nxt]):
                # u_i + v_j = c_ij on basic cells
                i, j = (node, nxt - m) if node < m else (nxt, node - m)
                pot[nxt] = cost[i, j] - pot[node]
                queue.append(nxt)
    return pot[:m], pot[m:]


def _tree_path(adj: List[List[int]], start: int, goal: int) -> List[int]:
    parent = {start: -1}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        if node == goal:
            break
        for nxt in adj[node]:
            if nxt not in parent:
                parent[nxt] = node
                queue.append(nxt)
    if goal not in parent:
        raise NumericalError("transportation basis is not a spanning tree")
    path = [goal]
    while path[-1] != start:
        path.append(parent[path[-1]])
    return path[::-1]


def _edge_cell(u: int, w: int, m: int) -> Tuple[int, int]:
    return (u, w - m) if u < m else (w, u - m)


def _solve_on_basis(a: np.ndarray, b: np.ndarray, basis: List[Tuple[int, int]]) -> np.ndarray:
    """Basic solution for marginals (a, b) by peeling leaves off the basis tree."""
    m, n = len(a), len(b)
    supply = np.concatenate([a, b]).astype(float)
    adj = [set(nbrs) for nbrs in _adjacency(m, n, basis)]
    x = np.zeros((m, n))
    leaves = deque(sorted(node for node in range(m + n) if len(adj[node]) == 1))
    remaining = len(basis)
    while remaining:
        node = leaves.popleft()
        if len(adj[node]) != 1:
            continue
        other = next(iter(adj[node]))
        i, j = _edge_cell(node, other, m)
        x[i, j] = supply[node]
        supply[other] -= supply[node]
        adj[node].discard(other)
        adj[other].discard(node)
        remaining -= 1
        if len(adj[other]) == 1:
            leaves.append(other)
    return x


def transportation_simplex(
    cost: np.ndarray,
    a: np.ndarray,
    b: np.ndarray,
) -> Tuple[np.ndarray, int]:
    """Exact minimizer of <cost, x> over couplings of ``a`` and ``b``.

    Degenerate vertices are avoided by the rank perturbation a_i += eps,
    b_last += m * eps; the returned plan is re-solved on the optimal basis
    with the unperturbed marginals.
    """
    cost = np.asarray(cost, dtype=float)
    m, n = cost.shape
    eps = 1e-9 / (m + n)
    a_eps = np.asarray(a, dtype=float) + eps
    b_eps = np.asarray(b, dtype=float).copy()
    b_eps[-1] += m * eps

    x, basis = _northwest_corner(a_eps, b_eps)
    in_basis = set(basis)
    tol = 1e-12 * max(1.0, float(np.max(np.abs(cost))) if cost.size else 1.0)

    pivots = 0
    while True:
        adj = _adjacency(m, n, basis)
        u, v = _potentials(cost, adj)
        reduced = cost - u[:, None] - v[None, :]
        entering = None
        # Bland: first improving cell in row-major order
        for i, j in zip(*np.nonzero(reduced < -tol)):
            if (int(i), int(j)) not in in_basis:
                entering = (int(i), int(j))
                break
        if entering is None:
            break
        pivots += 1
        if pivots > MAX_PIVOTS:
            raise NumericalError(f"transportation simplex did not terminate after {MAX_PIVOTS} pivots")

        ei, ej = entering
        path = _tree_path(adj, ei, m + ej)
        edges = [_edge_cell(path[t], path[t + 1], m) for t in range(len(path) - 1)]
        length = len(edges)
        minus = [edges[t] for t in range(length) if (length - 1 - t) % 2 == 0]
        plus = [edges[t] for t in range(length) if (length - 1 - t) % 2 == 1]
        leaving = min(minus, key=lambda cell: (x[cell], cell))
        theta = x[leaving]
        x[ei, ej] += theta
        for cell in plus:
            x[cell] += theta
        for cell in minus:
            x[cell] -= theta
        x[leaving] = 0.0
        basis.remove(leaving)
        in_basis.discard(leaving)
        basis.append(entering)
        in_basis.add(entering)

    plan = _solve_on_basis(np.asarray(a, dtype=float), np.asarray(b, dtype=float), basis)
    if float(plan.min(initial=0.0)) < -MARGINAL_TOL:
        logger.warning("transport plan had entries down to %.3g before clipping", float(plan.min()))
    return np.maximum(plan, 0.0), pivots


# =============================================================================
# PUBLIC API
# =============================================================================

def _check_pair(mu: QuantizedMeasure, nu: QuantizedMeasure, max_atoms: Optional[int] = MAX_ATOMS) -> None:
    if mu.manifold != nu.manifold:
        raise ManifoldMismatchError(f"Manifold mismatch: {mu.manifold.tag} vs {nu.manifold.tag}")
    for name, measure in (("source", mu), ("target", nu)):
        if max_atoms is not None and measure.n > max_atoms:
            raise UsageError(f"{name} measure has {measure.n} atoms; at most {max_atoms} are supported")
        total = math.fsum(measure.weights)
        if abs(total - 1.0) > MARGINAL_TOL:
            raise DataError(f"{name} weights sum to {total!r}, expected 1")


def cost_matrix(mu: QuantizedMeasure, nu: QuantizedMeasure) -> np.ndarray:
    return mu.codebook.geometry.distance_matrix(mu.codebook.centers, nu.codebook.centers)


def discrete_wasserstein(
    mu: QuantizedMeasure,
    nu: QuantizedMeasure,
    p: float = 1.0,
) -> Tuple[float, TransportPlan]:
    """Wasserstein-p distance between two quantized measures, with its optimal plan."""
    if not p >= 1.0:
        raise UsageError(f"transport exponent p must be >= 1, got {p}")
    _check_pair(mu, nu)
    dist = cost_matrix(mu, nu)
    cost = dist ** p
    plan, pivots = transportation_simplex(cost, mu.weights, nu.weights)
    total = max(float(np.sum(plan * cost)), 0.0)
    value = total ** (1.0 / p)
    logger.debug("transport %dx%d solved in %d pivots, cost %.6g", mu.n, nu.n, pivots, value)
    return value, TransportPlan(plan, mu, nu, value, p, pivots)


def circle_w1(mu: QuantizedMeasure, nu: QuantizedMeasure) -> float:
    """W1 on the circle with arc-length ground distance."""
    # sort-based, so the simplex atom cap does not apply
    _check_pair(mu, nu, max_atoms=None)
    if mu.manifold.kind is not ManifoldKind.CIRCLE:
        raise UsageError(f"circle_w1 needs circle measures, got {mu.manifold.tag}")
    theta = np.concatenate([mu.codebook.centers[:, 0], nu.codebook.centers[:, 0]])
    theta = np.asarray(normalize_angle(theta))
    mass = np.concatenate([mu.weights, -nu.weights])
    order = np.argsort(theta, kind="stable")
    theta, mass = theta[order], mass[order]
    level = np.cumsum(mass)
    # level k holds on [theta_k, theta_{k+1}), the last arc wraps to theta_0 + 2pi
    gaps = np.diff(np.append(theta, theta[0] + TWO_PI))
    by_level = np.argsort(level, kind="stable")
    cum = np.cumsum(gaps[by_level])
    median = level[by_level][int(np.searchsorted(cum, 0.5 * cum[-1]))]
    return float(np.sum(gaps * np.abs(level - median)))


def union_support(mu: QuantizedMeasure, nu: QuantizedMeasure) -> Codebook:
    """Atoms of ``mu`` followed by those atoms of ``nu`` not already present."""
    if mu.manifold != nu.manifold:
        raise ManifoldMismatchError(f"Manifold mismatch: {mu.manifold.tag} vs {nu.manifold.tag}")
    geometry = mu.codebook.geometry
    rows = [row for row in mu.codebook.centers]
    for row in nu.codebook.centers:
        d = geometry.distances(np.asarray(rows), row)
        if float(np.min(d)) > DISTINCT_TOL:
            rows.append(row)
    return Codebook.trusted(mu.manifold, np.asarray(rows))


def pad_to_support(measure: QuantizedMeasure, support: Codebook) -> QuantizedMeasure:
    geometry = support.geometry
    weights = np.zeros(support.n)
    for center, w in zip(measure.codebook.centers, measure.weights):
        d = geometry.distances(support.centers, center)
        weights[int(np.argmin(d))] += w
    return QuantizedMeasure(support, weights)


def padded_union_compare(
    mu: QuantizedMeasure,
    nu: QuantizedMeasure,
    p: float = 1.0,
) -> Tuple[float, TransportPlan]:
    """Both measures completed with zero masses on the union of supports, then compared."""
    support = union_support(mu, nu)
    return discrete_wasserstein(pad_to_support(mu, support), pad_to_support(nu, support), p)


def pairwise_transport(
    measures: Sequence[QuantizedMeasure],
    p: float = 1.0,
) -> Tuple[np.ndarray, List[Tuple[int, int, TransportPlan]]]:
    """Wasserstein-p between every pair ``i < j``, mirrored into a symmetric matrix.

    Returns the matrix (zero diagonal) and the optimal plan of every pair.
    """
    k = len(measures)
    out = np.zeros((k, k))
    plans: List[Tuple[int, int, TransportPlan]] = []
    for i in range(k):
        for j in range(i + 1, k):
            value, plan = discrete_wasserstein(measures[i], measures[j], p)
            out[i, j] = out[j, i] = value
            plans.append((i, j, plan))
    return out, plans


def distance_matrix(measures: Sequence[QuantizedMeasure], p: float = 1.0) -> np.ndarray:
    """Symmetric pairwise Wasserstein matrix with zero diagonal."""
    return pairwise_transport(measures, p)[0]


__all__ = [
    "MAX_ATOMS",
    "TransportPlan",
    "transportation_simplex",
    "cost_matrix",
    "discrete_wasserstein",
    "circle_w1",
    "union_support",
    "pad_to_support",
    "padded_union_compare",
    "pairwise_transport",
    "distance_matrix",
]
