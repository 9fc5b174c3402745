"""Streaming multi-kernel regression with similarity-graph kernel selection."""
from .backends import BACKEND_NAME
from .kernels import (KernelSpec, FeatureMap, PerKernelModel, default_dictionary,
                      eval_kernel, sample_spectral, rf_features, kernel_loss)
from .graph import (SimilarityMatrix, FeedbackGraph, RefinedEdgeSet,
                    delta_closed_form, delta_numeric, similarity_matrix,
                    build_graph, greedy_dominating_set, refine_edges,
                    verify_lemma2_bound)
from .learner import (Hyperparams, LearnerState, DrawOutcome, init_state,
                      compute_pmf, draw_node, predict, estimate_losses,
                      estimate_node_loss, update_theta, update_weights,
                      step, step_refined, run_stream)
from .baselines import (HindsightOracle, run_full_dictionary, fit_hindsight,
                        regret_curve)
from .data import (Dataset, StreamConfig, SyntheticSpec, load_dataset,
                   normalize, synthetic_stream)
from .harness import (ExperimentConfig, ExperimentResult, run_experiment,
                      compare, dump_graph, emit_plot_data, regret_slope)

__version__ = "0.1.0"
