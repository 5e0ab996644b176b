"""Local multiphoton absorption rates of monochromatic light and their quantum limit."""

from .bounds import BoundReport, check_bound, fock_bound, state_bound
from .errors import (
    BoundViolationError,
    ConvergenceError,
    DegenerateStateError,
    PhotonBoundError,
    SizeLimitError,
    TruncationError,
)
from .modes import (
    Constants,
    Direction,
    Mode,
    ModeGrid,
    X_HAT,
    Y_HAT,
    Z_HAT,
    angular_weight_integral,
    build_grid,
    coupling_weight,
    polarization,
)
from .optimize import OptimizationResult, RateOperator, apply_operator, power_iteration, rank_one_defect
from .rates import ORIGIN, FieldPoint, RateReport, fock_rate, mode_phase, pattern, state_rate
from .states import (
    FockAmplitude,
    LightState,
    SingleModeFunction,
    coherent_amplitude,
    fock_state,
    normalize,
    optimal_coherent_mode,
    poisson_superposition,
    random_symmetric_state,
    symmetrize,
)

__version__ = "0.1.0"
