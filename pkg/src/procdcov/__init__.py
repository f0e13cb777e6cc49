"""Distance covariance independence testing for stochastic processes observed
on a discretization grid of [0, 1]."""

from .bootstrap import (RngSpec, TestResult, bootstrap_null, independence_test,
                        permutation_test, u_boot)
from .dcov import (DcovParams, DistMatrix, c0_constant, dist_matrix,
                   dist_matrix_from_values, pair_dist_matrices, sample_dcor,
                   sample_dcov, u_stat_T)
from .experiments import (EXPERIMENT_IDS, ExperimentSpec, ResultRow,
                          default_spec, run_experiment, write_result_rows)
from .grid import (PairedSample, Partition, Trajectory, WeightedVector, embed,
                   read_pair_csv, read_trajectories_csv, step_l2_distance,
                   uniform_partition, write_pair_csv, write_trajectories_csv)
from .kernels import (H2Matrix, KernelContext, h2_matrix, h2_product_law,
                      kernel_f, kernel_h)
from .simulate import (FbmPairSpec, ParetoShockSpec, StableSpec, fbm_pair,
                       fbm_pair_values, gbm_path, gbm_values,
                       pareto_shock_pair, pareto_shock_values,
                       stable_levy_path, stable_values)

__version__ = "0.1.0"
