"""Kernel-similarity feedback graph.

Pairwise similarity between two shift-invariant kernels is the squared L2
distance between them as functions of the shift, integrated over R^d. For
Gaussian pairs the integral has a closed form; an adaptive-quadrature
evaluation is kept alongside as an independent oracle and for future
non-Gaussian dictionaries.

The graph puts an edge (i, j) whenever the similarity distance is within a
per-node threshold chosen so every node has exactly M out-neighbors
(self-loops included: the distance of a kernel to itself is zero). A greedy
set-cover pass attaches a dominating set.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .kernels import KernelSpec, eval_kernel


def delta_closed_form(spec_i: KernelSpec, spec_j: KernelSpec, d: int) -> float:
    """Exact integral of |kappa_i - kappa_j|^2 over R^d for Gaussian kernels.

    Equals pi^(d/2) (sigma_i^d + sigma_j^d)
    - 2 (2 pi sigma_i^2 sigma_j^2 / (sigma_i^2 + sigma_j^2))^(d/2).
    Evaluated in log-space so extreme bandwidths do not overflow.
    """
    si, sj = spec_i.sigma, spec_j.sigma
    log_pi = math.log(math.pi)
    la = 0.5 * d * log_pi + d * math.log(si)
    lb = 0.5 * d * log_pi + d * math.log(sj)
    lc = math.log(2.0) + 0.5 * d * (
        math.log(2.0) + log_pi + 2.0 * math.log(si) + 2.0 * math.log(sj)
        - math.log(si**2 + sj**2)
    )
    m = max(la, lb, lc)
    value = math.exp(m) * (math.exp(la - m) + math.exp(lb - m) - math.exp(lc - m))
    if not math.isfinite(value):
        raise OverflowError(
            f"similarity overflowed for sigma=({si}, {sj}), d={d}"
        )
    # The integrand is a perfect square; tiny negatives are roundoff.
    return max(value, 0.0)


def delta_numeric(spec_i: KernelSpec, spec_j: KernelSpec, d: int,
                  tol: float = 1e-10) -> float:
    """Quadrature oracle for the similarity integral (d in {1, 2, 3} only).

    Both kernels are isotropic, so the d-dimensional integral of
    |kappa_i - kappa_j|^2 reduces to the surface area of the unit sphere
    times a radial integral of r^(d-1) (kappa_i(r) - kappa_j(r))^2, which
    adaptive quadrature handles at any bandwidth ratio. Split at each
    bandwidth so narrow spikes are not missed.
    """
    if d not in (1, 2, 3):
        raise ValueError("quadrature oracle supports d in {1, 2, 3}")
    si, sj = spec_i.sigma, spec_j.sigma
    smax = max(si, sj)
    # exp(-R^2 / (2 smax^2)) < 1e-12  =>  R > smax sqrt(2 ln 1e12)
    radius = smax * math.sqrt(2.0 * math.log(1e12)) * 1.5
    breaks = sorted({s for s in (si, sj, 10 * min(si, sj)) if s < radius})

    def integrand(r):
        diff = math.exp(-r * r / (2 * si * si)) - math.exp(-r * r / (2 * sj * sj))
        return r ** (d - 1) * diff * diff

    value, err = integrate.quad(integrand, 0.0, radius, points=breaks,
                                epsabs=tol, epsrel=1e-10, limit=500)
    surface = 2.0 * math.pi ** (d / 2) / math.gamma(d / 2)
    value *= surface
    err *= surface
    if err > max(100 * tol, 1e-7 * abs(value)):
        raise RuntimeError(
            f"quadrature did not reach tolerance: value={value}, err={err}"
        )
    return value


def delta_box_quadrature(spec_i: KernelSpec, spec_j: KernelSpec, d: int,
                         tol: float = 1e-8) -> float:
    """Slow cross-check: tensor-product adaptive quadrature over a box.

    Kept as a third, structure-free route to the similarity integral; only
    practical for a handful of pairs.
    """
    if d not in (1, 2):
        raise ValueError("box quadrature supported for d in {1, 2}")
    smax = max(spec_i.sigma, spec_j.sigma)
    radius = smax * math.sqrt(2.0 * math.log(1e10)) * 1.5

    def integrand(*coords):
        rho = np.array(coords)
        return (eval_kernel(spec_i, rho) - eval_kernel(spec_j, rho)) ** 2

    value, err = integrate.nquad(
        integrand, [[-radius, radius]] * d,
        opts={"epsabs": tol, "epsrel": 1e-8, "limit": 200},
    )
    if err > max(tol, 1e-5 * abs(value)):
        raise RuntimeError(f"box quadrature tolerance failure: err={err}")
    return value


@dataclass(frozen=True)
class SimilarityMatrix:
    """Pairwise kernel similarity distances: symmetric, zero diagonal."""

    n: int
    delta: np.ndarray  # (N, N)
    input_dim: int


def similarity_matrix(specs: list[KernelSpec], d: int) -> SimilarityMatrix:
    n = len(specs)
    delta = np.zeros((n, n))
    for a, b in itertools.combinations(range(n), 2):
        delta[a, b] = delta[b, a] = delta_closed_form(specs[a], specs[b], d)
    if not np.all(np.isfinite(delta)):
        raise ValueError("non-finite similarity entries")
    return SimilarityMatrix(n=n, delta=delta, input_dim=d)


@dataclass
class FeedbackGraph:
    """Directed graph over kernel nodes; every node has a self-loop."""

    n: int
    out_adj: list[np.ndarray]   # out-neighbor indices per node, ascending
    in_adj: list[np.ndarray]    # derived in-neighbor indices per node
    thresholds: np.ndarray      # per-node edge threshold (M-th smallest delta)
    dominating_set: np.ndarray  # node indices

    def has_self_loops(self) -> bool:
        return all(i in set(nb.tolist()) for i, nb in enumerate(self.out_adj))


def _derive_in_adj(out_adj: list[np.ndarray], n: int) -> list[np.ndarray]:
    incoming: list[list[int]] = [[] for _ in range(n)]
    for i, nbrs in enumerate(out_adj):
        for j in nbrs:
            incoming[int(j)].append(i)
    return [np.array(sorted(lst), dtype=np.intp) for lst in incoming]


def greedy_dominating_set(out_adj: list[np.ndarray], n: int) -> np.ndarray:
    """Greedy set cover over out-neighborhoods (ties broken by lowest index).

    Self-loops guarantee every node can cover itself, so this terminates
    with a valid dominating set: every node ends up an out-neighbor of some
    chosen node.
    """
    uncovered = set(range(n))
    chosen: list[int] = []
    while uncovered:
        best, best_gain = -1, -1
        for i in range(n):
            gain = sum(1 for j in out_adj[i] if int(j) in uncovered)
            if gain > best_gain:
                best, best_gain = i, gain
        chosen.append(best)
        uncovered.difference_update(int(j) for j in out_adj[best])
    return np.array(sorted(chosen), dtype=np.intp)


def is_dominating(out_adj: list[np.ndarray], n: int, subset) -> bool:
    covered = set()
    for i in subset:
        covered.update(int(j) for j in out_adj[int(i)])
    return len(covered) == n


def build_graph(specs: list[KernelSpec], m: int, d: int,
                sim: SimilarityMatrix | None = None) -> FeedbackGraph:
    """Degree-capped feedback graph: out-neighbors of i are the M kernels
    with smallest similarity distance to i (i itself always included, since
    its self-distance is zero). Ties broken by lower kernel index."""
    n = len(specs)
    if not 1 <= m <= n:
        raise ValueError(f"out-degree M={m} must be in [1, {n}]")
    if sim is None:
        sim = similarity_matrix(specs, d)
    out_adj: list[np.ndarray] = []
    thresholds = np.empty(n)
    for i in range(n):
        order = np.argsort(sim.delta[i], kind="stable")  # stable => lowest index wins ties
        nbrs = np.sort(order[:m])
        out_adj.append(nbrs.astype(np.intp))
        thresholds[i] = sim.delta[i, order[m - 1]]
    in_adj = _derive_in_adj(out_adj, n)
    dom = greedy_dominating_set(out_adj, n)
    return FeedbackGraph(n=n, out_adj=out_adj, in_adj=in_adj,
                         thresholds=thresholds, dominating_set=dom)


@dataclass
class RefinedEdgeSet:
    """Per-round edge augmentation making a chosen subset dominating."""

    base: FeedbackGraph
    extra_edges: list[tuple[int, int]]   # (source in subset, target)
    dominating_set_t: np.ndarray
    in_adj: list[np.ndarray] = field(init=False)

    def __post_init__(self):
        in_adj = [nb.copy() for nb in self.base.in_adj]
        for src, dst in self.extra_edges:
            in_adj[dst] = np.append(in_adj[dst], src)
        self.in_adj = in_adj

    def out_neighbors(self, i: int) -> np.ndarray:
        extra = [dst for src, dst in self.extra_edges if src == i]
        if not extra:
            return self.base.out_adj[i]
        return np.unique(np.concatenate([self.base.out_adj[i], extra])).astype(np.intp)


def refine_edges(graph: FeedbackGraph, d_prime, sim: SimilarityMatrix) -> RefinedEdgeSet:
    """Attach every node with no in-edge from d_prime to its nearest member.

    The nearest member is the argmin of the similarity distance over
    d_prime (ties broken by lowest index), so the union graph is dominated
    by d_prime with one-hop coverage.
    """
    d_prime = np.asarray(sorted(int(i) for i in d_prime), dtype=np.intp)
    if d_prime.size == 0:
        raise ValueError("d_prime must be nonempty")
    members = set(d_prime.tolist())
    extra: list[tuple[int, int]] = []
    for i in range(graph.n):
        if i in members:
            continue
        if members.intersection(int(j) for j in graph.in_adj[i]):
            continue
        nearest = d_prime[int(np.argmin(sim.delta[i, d_prime]))]
        extra.append((int(nearest), i))
    return RefinedEdgeSet(base=graph, extra_edges=extra, dominating_set_t=d_prime)


def unit_ball_volume(d: int) -> float:
    return math.pi ** (d / 2) / math.gamma(d / 2 + 1)


def verify_lemma2_bound(spec_i: KernelSpec, spec_j: KernelSpec,
                        points: np.ndarray, alphas_i: np.ndarray,
                        alphas_j: np.ndarray) -> bool:
    """Numeric check (d=1) that the average gap between the two kernels'
    expansions over the unit ball is bounded by the similarity distance.

    LHS: (1/U_d) integral over the unit ball of |f_i - f_j|^2 where
    f_k(x) = sum_t alpha_{k,t} kappa_k(x - x_t).
    RHS: (2 C_m / U_d) sum_t (delta_ij + 2 U_d) with
    C_m = max_k sum_t alpha_{k,t}^2 and U_d the unit-ball volume.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if points.shape[1] != 1:
        raise ValueError("bound check implemented for d=1 only")
    if np.any(np.linalg.norm(points, axis=1) > 1.0 + 1e-12):
        raise ValueError("sample points must lie in the unit ball")
    t_count = points.shape[0]
    u_d = unit_ball_volume(1)

    def gap(x):
        fi = sum(alphas_i[t] * eval_kernel(spec_i, np.array([x]) - points[t])
                 for t in range(t_count))
        fj = sum(alphas_j[t] * eval_kernel(spec_j, np.array([x]) - points[t])
                 for t in range(t_count))
        return (fi - fj) ** 2

    lhs_int, err = integrate.quad(gap, -1.0, 1.0, epsabs=1e-10, epsrel=1e-9, limit=200)
    if err > max(1e-8, 1e-6 * abs(lhs_int)):
        raise RuntimeError(f"quadrature tolerance failure: err={err}")
    lhs = lhs_int / u_d

    c_m = max(float(np.sum(alphas_i**2)), float(np.sum(alphas_j**2)))
    delta = delta_closed_form(spec_i, spec_j, 1)
    rhs = (2.0 * c_m / u_d) * t_count * (delta + 2.0 * u_d)
    return lhs <= rhs + 1e-12
