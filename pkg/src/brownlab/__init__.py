"""Numerical laboratory for empirical Brown spectra, microstate membership
experiments, and free-entropy bounds of a single non-normal operator."""

__version__ = "0.1.0"

from .matcore import (
    StarWord,
    all_words,
    trace_word,
    operator_norm,
    eigenvalues,
    schur_decompose,
    fk_determinant,
    offdiag_second_moment,
)
from .measures import (
    MeasureSpec,
    point_mass,
    uniform_disk,
    uniform_circle,
    semicircle,
    finite_atomic,
    empirical,
    moment,
    log_energy,
    empirical_log_energy,
    moment_distance,
)
from .ensembles import Seed, EnsembleSpec, sample
from .models import OperatorModel, StarMomentTable, target_table
from .microstates import MicrostateSpec, in_microstates, in_improved_microstates, hit_rate
from .entropy import (
    diagonal_entropy,
    entropy_upper_bound,
    selfadjoint_entropy,
    variance_bound,
    ball_log_volume,
    ball_log_volume_limit,
)
