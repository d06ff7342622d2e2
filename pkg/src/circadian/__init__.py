"""Goldbeter's circadian PER model analysed as two monotone blocks in feedback."""
from .characteristics import (
    DEFAULT_MBAR,
    ConditionReport,
    StateSpaceReport,
    char_mrna,
    char_per,
    check_proposition_conditions,
    check_state_space,
    invert_mm,
)
from .errors import (
    ConstraintViolation,
    InsufficientData,
    NoBracket,
    NonFinite,
    NotConverged,
    SaturationExceeded,
    UsageError,
)
from .integrate import (
    DelayHistory,
    OscillationMetrics,
    Trajectory,
    integrate_dde,
    integrate_ode,
    oscillation_metrics,
    steady_state,
)
from .model import (
    FullState,
    ModelParams,
    PerState,
    SubsystemIO,
    hill_rate,
    mm_rate,
    rhs_full,
    rhs_mrna,
    rhs_per,
)
from .smallgain import (
    Converged,
    MaxIterReached,
    SpiderwebTrace,
    TwoCycle,
    Verdict,
    closed_loop_equilibrium,
    composed_map,
    iterate_spiderweb,
    small_gain_verdict,
)

__version__ = "0.1.0"
