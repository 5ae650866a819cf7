"""Kernel sufficient dimension reduction for right-censored survival data."""

from .association import RmaeResult, kaplan_meier, km_eval, rmae, spearman
from .benchmark import BenchConfig, BenchRow, BenchTable, format_table
from .benchmark import run as run_benchmark
from .eigensolve import reg_gen_eig, select_components, unitize
from .errors import (
    CalibrationError,
    DegenerateDirectionError,
    InputError,
    KernsdrError,
    LocalSupportError,
    NumericalError,
    SliceDegeneracyError,
)
from .hazard import (
    HazardSmoother,
    ReducedCoordinates,
    bandwidth,
    cond_survival,
    cum_hazard,
    nw_density,
    weight,
)
from .kernels import (
    GramMatrix,
    KernelSpec,
    cross_kernel,
    eval_kernel,
    gram,
    kernel_matrix,
    median_heuristic_scale,
    resolve_spec,
)
from .sdr import (
    FitOptions,
    SdrModel,
    SurvivalDataset,
    fit,
    fit_dsir,
    fit_joint,
    transform,
)
from .simulate import (
    SimOutput,
    SimSpec,
    beta_vectors,
    calibrate_c,
    default_kernel,
    generate,
    truth_matrix,
)
from .slicing import (
    DoubleSlicePlan,
    SlicePlan,
    WeightedSliceMatrices,
    double_slice_q,
    make_slices,
    weighted_slice_matrices,
)
from .tuning import TuningResult, make_grid, tau0, tune, tune_joint

__version__ = "0.1.0"
