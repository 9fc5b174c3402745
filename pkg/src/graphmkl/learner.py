"""Online multi-kernel learners driven by the similarity feedback graph.

Each round: draw a node from an exploration-mixed distribution over the
graph, predict with the drawn node's out-neighborhood of kernels, estimate
losses by importance weighting, then apply gradient and multiplicative
weight updates. The refined variant additionally promotes the currently
best-weighted nodes to a per-round dominating set, adding edges so every
kernel keeps a minimum observation probability.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import backends
from .graph import FeedbackGraph, RefinedEdgeSet, SimilarityMatrix, refine_edges
from .kernels import kernel_loss_and_grad


@dataclass
class Hyperparams:
    eta: float
    xi: float
    num_rf: int = 50
    out_degree: int = 5
    lam: float = 1e-3
    beta_rank: int = 10
    exploit_after: int | None = 300
    variant: str = "plain"  # "plain" or "refined"

    def __post_init__(self):
        if self.eta <= 0:
            raise ValueError("eta must be positive")
        if not 0 < self.xi < 1:
            raise ValueError("xi must be in (0, 1)")
        if self.variant not in ("plain", "refined"):
            raise ValueError(f"unknown variant {self.variant!r}")


@dataclass
class LearnerState:
    thetas: np.ndarray        # (N, 2D)
    kernel_weights: np.ndarray  # w, (N,)
    node_weights: np.ndarray    # u, (N,)
    t: int
    rng: np.random.Generator


def init_state(n: int, num_rf: int, rng: np.random.Generator) -> LearnerState:
    return LearnerState(
        thetas=np.zeros((n, 2 * num_rf)),
        kernel_weights=np.ones(n),
        node_weights=np.ones(n),
        t=0,
        rng=rng,
    )


@dataclass
class DrawOutcome:
    node: int
    subset: np.ndarray
    pmf: np.ndarray
    q: np.ndarray


def combined_loss(pred: float, y: float) -> float:
    """Loss of the combined prediction: squared error clipped to [0, 1]."""
    return min((pred - y) ** 2, 1.0)


def compute_pmf(node_weights: np.ndarray, dominating_set, xi: float) -> np.ndarray:
    """Exploration-mixed node distribution:
    p_i = (1 - xi) u_i / U + (xi / |D|) 1{i in D}."""
    dom = np.asarray(dominating_set, dtype=np.intp)
    if dom.size == 0:
        raise ValueError("dominating set must be nonempty")
    p = (1.0 - xi) * node_weights / node_weights.sum()
    p[dom] += xi / dom.size
    return p


def draw_node(pmf: np.ndarray, rng: np.random.Generator) -> int:
    """Inverse-CDF draw from a distribution on the simplex."""
    if np.any(pmf < 0) or abs(pmf.sum() - 1.0) > 1e-9:
        raise ValueError("pmf must be a probability distribution")
    cdf = np.cumsum(pmf)
    cdf[-1] = 1.0
    return int(np.searchsorted(cdf, rng.random(), side="right"))


def estimate_losses(subset: np.ndarray, q: np.ndarray,
                    losses: np.ndarray) -> np.ndarray:
    """Importance-weighted per-kernel loss estimates: L_i / q_i on the
    selected subset, zero elsewhere."""
    if np.any(q[subset] <= 0):
        raise RuntimeError("selected kernel with zero observation probability")
    est = np.zeros(q.shape[0])
    est[subset] = losses / q[subset]
    return est


def estimate_node_loss(node: int, pmf: np.ndarray, loss: float) -> np.ndarray:
    """Importance-weighted node-level estimate: nonzero only at the drawn node."""
    if pmf[node] <= 0:
        raise RuntimeError("drawn node has zero probability")
    est = np.zeros(pmf.shape[0])
    est[node] = loss / pmf[node]
    return est


def update_theta(state: LearnerState, subset: np.ndarray, q: np.ndarray,
                 grads: np.ndarray, eta: float) -> None:
    """Importance-weighted gradient step on the selected kernels only."""
    if not np.all(np.isfinite(grads)):
        raise FloatingPointError("non-finite gradient in theta update")
    state.thetas[subset] -= (eta / q[subset])[:, None] * grads


def update_weights(state: LearnerState, loss_est: np.ndarray,
                   node_loss_est: np.ndarray, eta: float,
                   freeze_u: bool = False) -> None:
    """Multiplicative updates for kernel and node weights, then rescale by
    the maxima so long streams cannot underflow. Every consumer (pmf,
    prediction weights, argmax) only sees ratios, so rescaling is neutral."""
    w = state.kernel_weights
    w *= np.exp(-eta * loss_est)
    w /= w.max()
    if not freeze_u:
        u = state.node_weights
        u *= np.exp(-eta * node_loss_est)
        u /= u.max()


def _q_from_pmf(pmf: np.ndarray, in_adj: list[np.ndarray]) -> np.ndarray:
    return np.array([pmf[nbrs].sum() for nbrs in in_adj])


def predict_subset(state: LearnerState, subset: np.ndarray,
                   z_sub: np.ndarray, preds: np.ndarray) -> float:
    """Weighted combination over the subset with weights w_i / sum w."""
    w_sub = state.kernel_weights[subset]
    return float((w_sub / w_sub.sum()) @ preds)


def predict(state: LearnerState, subset: np.ndarray, psi_stack: np.ndarray,
            x: np.ndarray) -> float:
    """Combined prediction from scratch (evaluates only the subset's features)."""
    subset = np.asarray(subset, dtype=np.intp)
    if subset.size == 0:
        raise ValueError("subset must be nonempty")
    _, preds = backends.evaluate_subset(psi_stack, state.thetas, subset,
                                        np.asarray(x, dtype=float))
    return predict_subset(state, subset, None, preds)


def _round_core(state: LearnerState, pmf: np.ndarray, in_adj: list[np.ndarray],
                subset: np.ndarray, node: int, psi_stack: np.ndarray,
                x: np.ndarray, y: float, hp: Hyperparams,
                freeze_u: bool = False) -> tuple[float, DrawOutcome]:
    """Shared tail of a round: predict, estimate, update."""
    z_sub, preds = backends.evaluate_subset(psi_stack, state.thetas, subset, x)
    pred = predict_subset(state, subset, z_sub, preds)

    losses = np.empty(subset.size)
    grads = np.empty_like(z_sub)
    for k, i in enumerate(subset):
        losses[k], grads[k] = kernel_loss_and_grad(
            state.thetas[i], z_sub[k], y, hp.lam)

    q = _q_from_pmf(pmf, in_adj)
    loss_est = estimate_losses(subset, q, losses)
    update_theta(state, subset, q, grads, hp.eta)

    node_loss_est = estimate_node_loss(node, pmf, combined_loss(pred, y))
    update_weights(state, loss_est, node_loss_est, hp.eta, freeze_u=freeze_u)
    state.t += 1
    return pred, DrawOutcome(node=node, subset=subset, pmf=pmf, q=q)


def _select_node(state: LearnerState, pmf: np.ndarray,
                 hp: Hyperparams) -> tuple[int, np.ndarray]:
    """Sample a node, or switch to the best-weighted node late in the
    stream (the draw then becomes deterministic: its pmf is one-hot so the
    importance weights stay well-defined)."""
    if hp.exploit_after is not None and state.t >= hp.exploit_after:
        node = int(np.argmax(state.node_weights))
        det = np.zeros_like(pmf)
        det[node] = 1.0
        return node, det
    return draw_node(pmf, state.rng), pmf


def step(state: LearnerState, graph: FeedbackGraph, hp: Hyperparams,
         psi_stack: np.ndarray, x: np.ndarray, y: float,
         freeze_u: bool = False) -> tuple[float, DrawOutcome]:
    """One round of the plain variant on the static feedback graph."""
    x = np.ascontiguousarray(x, dtype=float)
    pmf = compute_pmf(state.node_weights, graph.dominating_set, hp.xi)
    node, pmf = _select_node(state, pmf, hp)
    subset = graph.out_adj[node]
    return _round_core(state, pmf, graph.in_adj, subset, node,
                       psi_stack, x, y, hp, freeze_u=freeze_u)


def refined_dominating_set(node_weights: np.ndarray, xi: float,
                           beta_rank: int) -> tuple[np.ndarray, float]:
    """Per-round promoted subset: nodes whose normalized weight reaches the
    beta_rank-th greatest value, together with the resulting floor beta_t."""
    u_bar = node_weights / node_weights.sum()
    k = min(beta_rank, u_bar.size)
    kth = np.sort(u_bar)[::-1][k - 1]
    beta_t = (1.0 - xi) * kth + xi / u_bar.size
    d_prime = np.flatnonzero(u_bar >= kth).astype(np.intp)
    return d_prime, beta_t


def step_refined(state: LearnerState, graph: FeedbackGraph,
                 sim: SimilarityMatrix, hp: Hyperparams,
                 psi_stack: np.ndarray, x: np.ndarray, y: float,
                 ) -> tuple[float, DrawOutcome, RefinedEdgeSet]:
    """One round of the refined variant: promote the top-weighted nodes,
    patch edges so they dominate, then proceed as in the plain round."""
    x = np.ascontiguousarray(x, dtype=float)
    d_prime, _ = refined_dominating_set(state.node_weights, hp.xi, hp.beta_rank)
    refined = refine_edges(graph, d_prime, sim)
    pmf = compute_pmf(state.node_weights, d_prime, hp.xi)
    node, pmf = _select_node(state, pmf, hp)
    subset = refined.out_neighbors(node)
    pred, outcome = _round_core(state, pmf, refined.in_adj, subset, node,
                                psi_stack, x, y, hp)
    return pred, outcome, refined


def trace_record(t: int, outcome: DrawOutcome, pred: float, loss: float) -> str:
    """Newline-delimited JSON debug record for one round."""
    p = outcome.pmf[outcome.pmf > 0]
    entropy = float(-(p * np.log(p)).sum())
    return json.dumps({
        "round": t,
        "node": int(outcome.node),
        "subset": [int(i) for i in outcome.subset],
        "prediction": pred,
        "loss": loss,
        "pmf_entropy": entropy,
    })


def run_stream(features: np.ndarray, targets: np.ndarray, graph: FeedbackGraph,
               hp: Hyperparams, psi_stack: np.ndarray,
               rng: np.random.Generator, sim: SimilarityMatrix | None = None,
               trace_file=None) -> np.ndarray:
    """Run one pass over a stream; returns the per-round predictions."""
    n = graph.n
    state = init_state(n, hp.num_rf, rng)
    preds = np.empty(targets.shape[0])
    for t in range(targets.shape[0]):
        if hp.variant == "refined":
            if sim is None:
                raise ValueError("refined variant needs the similarity matrix")
            pred, outcome, _ = step_refined(state, graph, sim, hp, psi_stack,
                                            features[t], float(targets[t]))
        else:
            pred, outcome = step(state, graph, hp, psi_stack,
                                 features[t], float(targets[t]))
        preds[t] = pred
        if trace_file is not None:
            loss = combined_loss(pred, float(targets[t]))
            trace_file.write(trace_record(t, outcome, pred, loss) + "\n")
    return preds
