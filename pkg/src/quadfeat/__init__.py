"""Kernel approximation with stochastic spherical-radial quadrature features."""

from quadfeat.analysis import (
    BoundInputs,
    beta_d,
    required_D_krr,
    required_D_quadrature,
    required_D_rff,
    variance_bound_sr33,
)
from quadfeat.baselines import build_baseline_map, halton_sequence
from quadfeat.bench import ExperimentConfig, run_experiment, walltime_mapping
from quadfeat.data import Dataset, load_dataset
from quadfeat.kernels import ARCCOS0, ARCCOS1, Kernel, gaussian, kernel_exact
from quadfeat.linalg import (
    ButterflyOrthogonal,
    fwht_normalized,
    haar_qr_orthogonal,
    sample_butterfly,
    simplex_vertices,
)
from quadfeat.quadrature import (
    FeatureMap,
    build_feature_map,
    map_point,
    sample_sr33,
    sr33_estimate,
)

__version__ = "0.1.0"
