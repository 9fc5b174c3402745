"""Experiment orchestration: repeated runs, MSE curves, timings, reports.

A run repeats the online pass R times with fresh feature-map seeds, then
averages the running mean squared error over repeats:
MSE_t = (1/R) sum_r (1/t) sum_{tau<=t} (pred_tau - y_tau)^2.
Wall-clock is measured around the learning loop only; similarity-matrix
and graph construction are offline costs reported separately.
"""
from __future__ import annotations

import json
import time
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np

from . import baselines, data, graph as graphmod, kernels, learner

ALGORITHMS = ("sfg-mkl", "sfg-mkl-r", "full-dictionary", "hindsight")


class ConfigError(Exception):
    pass


@dataclass
class ExperimentConfig:
    algorithm: str
    dataset: str = "synthetic"
    manifest: str | None = None
    repeats: int = 10
    base_seed: int = 0
    horizon: int | None = None
    shuffle_seed: int | None = None
    num_kernels: int = 41
    num_rf: int = 50
    out_degree: int = 5
    lam: float = 1e-3
    eta: float | None = None   # default 1/sqrt(T)
    xi: float | None = None    # default 1/sqrt(T)
    beta_rank: int = 10
    exploit_after: int | None = 300
    synthetic_kernel_index: int = 21
    synthetic_noise: float = 0.01
    synthetic_dim: int = 2
    out: str | None = None

    def validate(self):
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {self.algorithm!r}")
        if self.repeats < 1:
            raise ConfigError("repeats must be >= 1")
        if self.dataset == "synthetic" and self.horizon is None:
            raise ConfigError("synthetic runs need an explicit horizon")
        if self.dataset != "synthetic" and self.manifest is None:
            raise ConfigError("real datasets need a manifest path")


@dataclass
class ExperimentResult:
    config: dict
    seeds: list[int]
    predictions: np.ndarray     # (R, T)
    targets: np.ndarray         # (T,)
    mse_curve: np.ndarray       # (T,)
    final_mse: float
    online_seconds: float
    offline_seconds: float

    def to_json(self) -> str:
        payload = {
            "config": self.config,
            "seeds": self.seeds,
            "mse_curve": [float(v) for v in self.mse_curve],
            "final_mse": self.final_mse,
            "online_seconds": self.online_seconds,
            "offline_seconds": self.offline_seconds,
        }
        return json.dumps(payload, indent=2, sort_keys=True)

    def save(self, path: str | Path):
        Path(path).write_text(self.to_json() + "\n")


def mse_over_time(predictions: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """Repeat-averaged running MSE; predictions has shape (R, T)."""
    sq = (predictions - targets[None, :]) ** 2
    t = np.arange(1, targets.shape[0] + 1)
    return (np.cumsum(sq, axis=1) / t[None, :]).mean(axis=0)


def _load_stream(config: ExperimentConfig) -> data.Dataset:
    if config.dataset == "synthetic":
        specs = kernels.default_dictionary(config.num_kernels)
        spec = data.SyntheticSpec(
            kernel=specs[config.synthetic_kernel_index - 1],
            input_dim=config.synthetic_dim,
            num_rf=config.num_rf,
            noise=config.synthetic_noise,
        )
        return data.synthetic_stream(spec, seed=config.base_seed,
                                     horizon=config.horizon)
    ds = data.normalize(data.load_dataset(config.dataset, config.manifest))
    return data.apply_stream_config(
        ds, data.StreamConfig(shuffle_seed=config.shuffle_seed,
                              horizon=config.horizon))


def _hyperparams(config: ExperimentConfig, horizon: int,
                 variant: str) -> learner.Hyperparams:
    default_rate = 1.0 / np.sqrt(horizon)
    return learner.Hyperparams(
        eta=config.eta if config.eta is not None else default_rate,
        xi=config.xi if config.xi is not None else default_rate,
        num_rf=config.num_rf,
        out_degree=config.out_degree,
        lam=config.lam,
        beta_rank=min(config.beta_rank, config.num_kernels),
        exploit_after=config.exploit_after,
        variant=variant,
    )


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    config.validate()
    stream = _load_stream(config)
    specs = kernels.default_dictionary(config.num_kernels)

    t0 = time.perf_counter()
    sim = graphmod.similarity_matrix(specs, stream.input_dim)
    fgraph = graphmod.build_graph(specs, config.out_degree, stream.input_dim,
                                  sim=sim)
    offline_seconds = time.perf_counter() - t0

    horizon = stream.num_samples
    seeds = [config.base_seed + r + 1 for r in range(config.repeats)]
    predictions = np.empty((config.repeats, horizon))
    online_seconds = 0.0
    for r, seed in enumerate(seeds):
        rng = np.random.default_rng(seed)
        fmaps = [kernels.sample_spectral(s, config.num_rf, stream.input_dim, rng)
                 for s in specs]
        psi_stack = kernels.spectral_stack(fmaps)
        t0 = time.perf_counter()
        if config.algorithm == "sfg-mkl":
            hp = _hyperparams(config, horizon, "plain")
            preds = learner.run_stream(stream.features, stream.targets,
                                       fgraph, hp, psi_stack, rng)
        elif config.algorithm == "sfg-mkl-r":
            hp = _hyperparams(config, horizon, "refined")
            preds = learner.run_stream(stream.features, stream.targets,
                                       fgraph, hp, psi_stack, rng, sim=sim)
        elif config.algorithm == "full-dictionary":
            hp = _hyperparams(config, horizon, "plain")
            preds = baselines.run_full_dictionary(
                stream.features, stream.targets, psi_stack, hp.eta, hp.lam)
        else:  # hindsight
            oracle = baselines.fit_hindsight(stream.features, stream.targets,
                                             psi_stack, config.lam)
            preds = oracle.predictions(stream.features)
        online_seconds += time.perf_counter() - t0
        predictions[r] = preds

    mse_curve = mse_over_time(predictions, stream.targets)
    result = ExperimentResult(
        config=asdict(config),
        seeds=seeds,
        predictions=predictions,
        targets=stream.targets,
        mse_curve=mse_curve,
        final_mse=float(mse_curve[-1]),
        online_seconds=online_seconds,
        offline_seconds=offline_seconds,
    )
    if config.out:
        result.save(config.out)
    return result


@dataclass
class ComparisonRow:
    algorithm: str
    final_mse: float
    online_seconds: float
    offline_seconds: float


def compare(configs: list[ExperimentConfig]) -> dict:
    """Run several algorithms on the same stream and tabulate MSE/run time."""
    if not configs:
        raise ConfigError("no configurations to compare")
    key = [(c.dataset, c.horizon, c.base_seed, c.repeats) for c in configs]
    if len(set(key)) != 1:
        raise ConfigError("compared configs must share dataset, horizon, "
                          "base seed, and repeats")
    rows = []
    results = {}
    for config in configs:
        result = run_experiment(config)
        results[config.algorithm] = result
        rows.append(ComparisonRow(
            algorithm=config.algorithm,
            final_mse=result.final_mse,
            online_seconds=result.online_seconds,
            offline_seconds=result.offline_seconds,
        ))
    ratios = {
        f"{a.algorithm}/{b.algorithm}": a.online_seconds / b.online_seconds
        for a in rows for b in rows if a.algorithm != b.algorithm
    }
    return {"rows": [asdict(r) for r in rows], "speed_ratios": ratios,
            "results": results}


def format_comparison(report: dict) -> str:
    lines = [f"{'algorithm':<18} {'final MSE (x1e-3)':>18} {'online s':>10} {'offline s':>10}"]
    for row in report["rows"]:
        lines.append(f"{row['algorithm']:<18} {row['final_mse'] * 1e3:>18.3f} "
                     f"{row['online_seconds']:>10.3f} {row['offline_seconds']:>10.3f}")
    return "\n".join(lines)


def dump_graph(specs: list[kernels.KernelSpec], m: int, d: int,
               path: str | Path) -> graphmod.FeedbackGraph:
    """Write the feedback graph as text: node metadata then 1-based edges."""
    sim = graphmod.similarity_matrix(specs, d)
    fgraph = graphmod.build_graph(specs, m, d, sim=sim)
    dom = set(int(i) for i in fgraph.dominating_set)
    lines = ["# node gamma dominating"]
    for i in range(fgraph.n):
        lines.append(f"# {i + 1} {fgraph.thresholds[i]:.12g} {int(i in dom)}")
    lines.append("# edges: i j delta_ij")
    for i in range(fgraph.n):
        for j in fgraph.out_adj[i]:
            lines.append(f"{i + 1} {int(j) + 1} {sim.delta[i, int(j)]:.12g}")
    Path(path).write_text("\n".join(lines) + "\n")
    return fgraph


def emit_plot_data(result: ExperimentResult, path: str | Path):
    """CSV of the MSE curve: deterministic formatting, one row per round."""
    algorithm = result.config["algorithm"]
    lines = ["t,mse,algorithm"]
    for t, value in enumerate(result.mse_curve, start=1):
        lines.append(f"{t},{value:.12g},{algorithm}")
    Path(path).write_text("\n".join(lines) + "\n")


def regret_slope(algorithm: str, horizons: list[int], seeds: list[int],
                 kernel_index: int = 21, num_kernels: int = 41,
                 num_rf: int = 50, out_degree: int = 5, lam: float = 1e-3,
                 noise: float = 0.01, input_dim: int = 2,
                 beta_rank: int = 10) -> float:
    """Mean log-log slope of terminal regret vs horizon over seeds.

    Rates are set to 1/sqrt(T) per horizon; the late-stream exploitation
    switch is disabled so the sampling behavior matches the analysis.
    """
    specs = kernels.default_dictionary(num_kernels)
    gen = data.SyntheticSpec(kernel=specs[kernel_index - 1], input_dim=input_dim,
                             num_rf=num_rf, noise=noise)
    sim = graphmod.similarity_matrix(specs, input_dim)
    fgraph = graphmod.build_graph(specs, out_degree, input_dim, sim=sim)
    slopes = []
    for seed in seeds:
        regrets = []
        for horizon in horizons:
            stream = data.synthetic_stream(gen, seed=seed, horizon=horizon)
            rng = np.random.default_rng(seed + 1)
            fmaps = [kernels.sample_spectral(s, num_rf, input_dim, rng)
                     for s in specs]
            psi_stack = kernels.spectral_stack(fmaps)
            rate = 1.0 / np.sqrt(horizon)
            hp = learner.Hyperparams(
                eta=rate, xi=rate, num_rf=num_rf, out_degree=out_degree,
                lam=lam, beta_rank=min(beta_rank, num_kernels),
                exploit_after=None,
                variant="refined" if algorithm == "sfg-mkl-r" else "plain")
            preds = learner.run_stream(stream.features, stream.targets,
                                       fgraph, hp, psi_stack, rng, sim=sim)
            oracle = baselines.fit_hindsight(stream.features, stream.targets,
                                             psi_stack, lam)
            learner_losses = np.minimum((preds - stream.targets) ** 2, 1.0)
            oracle_losses = np.minimum(
                (oracle.predictions(stream.features) - stream.targets) ** 2, 1.0)
            curve = baselines.regret_curve(learner_losses, oracle_losses)
            regrets.append(max(float(curve[-1]), 1e-6))
        slope = np.polyfit(np.log(horizons), np.log(regrets), 1)[0]
        slopes.append(slope)
    return float(np.mean(slopes))
