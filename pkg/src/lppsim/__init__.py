"""Directed percolation passage times, path transforms, random matrix
edge laws, and the numerics connecting them.

The package simulates last/first passage functionals over iid weight
arrays, realizes the queueing-operator path transform whose top line
reproduces the largest eigenvalue law, samples tridiagonal random
matrix ensembles with a from-scratch bisection eigensolver, evaluates
the limiting edge distribution through its Painleve representation,
and verifies the classical time-constant formulas, all under a
counter-based RNG scheme that makes every experiment reproducible
bit-for-bit at any worker count.
"""

__version__ = "1.0.0"

from .errors import (DimensionError, DomainError, JobError,
                     NumericalConsistencyError, OracleScopeError,
                     ParameterError, ValidationError)
from .weights import (RngStream, WeightDistribution, exponential, from_config,
                      gaussian, geometric, rademacher, two_point,
                      uniform_interval)
from .percolation import (PassageResult, WeightMatrix, brute_force_oracle,
                          evaluate_path_partition, evaluate_theorem_partition,
                          first_passage_path_form, first_passage_theorem_form,
                          last_passage_path_form, last_passage_theorem_form,
                          read_weight_matrix_csv, sample_weight_matrix,
                          selection_bounds, write_weight_matrix_csv)
from .paths import (DiscretePath, PathEnsemble, brownian_ensemble,
                    brownian_path, g_inf, g_sup, gamma_k, negate, odot,
                    otimes, sup_norm_distance, write_ensemble_csv)
from .rmt import (EigenSample, TridiagonalMatrix, extreme_eigenvalues,
                  sample_extremes, sample_gue_tridiagonal, scaled_edge_sample)
from .tracy_widom import (AiryValue, StepControl, TWTable, airy,
                          build_tw_table, default_table, f_gue,
                          f_gue_from_q, f_gue_quantile, hastings_mcleod,
                          table_mean_variance, write_tw_table_csv)
from .skorohod import (ExitIntervalLaw, StoppingRecord, build_exit_law,
                       embedded_walk, simulate_embedding,
                       write_stopping_records_csv)
from .stats import (EcdfSummary, KSResult, center_scale_last_passage,
                    center_scale_theorem_form, ecdf_summary,
                    ks_critical_coefficient, ks_one_sample, ks_two_sample,
                    standard_normal_cdf)
from .timeconstants import (ShapePoint, extrapolate_inverse_cuberoot,
                            predicted_constant_exponential,
                            predicted_constant_geometric, square_shape_point,
                            thin_rectangle_constant, write_shape_points_csv)
from .config import (ExperimentConfig, apply_overrides, config_from_dict,
                     config_from_json)
from .experiments import (ExperimentReport, parallel_map, report_from_json,
                          run_experiment, write_report)
