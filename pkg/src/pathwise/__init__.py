"""Pathwise stochastic integration on step paths.

The integral of a predictable integrand against a semimartingale path is
approximated by Lebesgue-Stieltjes integrals of window-averaged integrands,
computed from the paths alone, so one routine serves every law at once.
"""

from .bichteler import (
    CrossingSchedule,
    karandikar_integral,
    level_crossing_times,
    pathwise_qv,
)
from .convergence import (
    ConvergenceReport,
    aggregation_experiment,
    approximation_experiment,
    left_continuous_mode,
    pathwise_purity_check,
    qv_experiment,
    truncation_experiment,
    ucp_distance,
)
from .estimators import AveragedIntegrator, LevelCrossingIntegrator, PathwiseQuadraticVariation
from .exceptions import ConfigError, DomainError
from .paths import CadlagPath, ClockProcess, Mode, SampledIntegrand, regularize_clock, uniform_grid
from .scenarios import (
    JumpDiffusion,
    PathSample,
    Scenario,
    TimeChange,
    TimeChangedBM,
    reference_ito_integral,
    sample_path,
    scenario_clock,
)
from .stieltjes import (
    AveragedIntegrand,
    IntegrationResult,
    approximate_integral,
    averaging_operator,
    ibp_integral,
    integrand_truncation,
    jump_truncation,
    ls_integral,
)

__version__ = "0.1.0"
