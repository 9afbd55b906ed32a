"""Stochastic unitary measurement dynamics with random Hamiltonians.

Library layout:

- ``grids``      discretized states, inner products, moments, tensor products
- ``geometry``   projective distances, Gaussian packets, detector classes
- ``gue``        random-Hamiltonian sampling, exact unitary steps, calibration
- ``reduction``  detector-registered walks driving the measurement experiments
- ``dynamics``   split-step propagation and the Newtonian reference
- ``experiments`` the reproducible Monte-Carlo scenarios
- ``cli``        config-driven driver emitting CSV/JSON records and SVG plots
"""

from .errors import (
    BoundaryContaminationWarning,
    CalibrationError,
    ConfigurationError,
    DegenerateStateError,
    DegenerateTargetError,
    DomainError,
    RmdynError,
)
from .grids import (
    Grid1D,
    WaveFunction,
    WaveFunction2,
    inner,
    marginal,
    momentum_expectation,
    norm,
    normalize,
    position_moments,
    tensor,
)
from .geometry import (
    ClassDistanceResult,
    EquivalenceClassSpec,
    GaussianParams,
    TauSChart,
    class_distance,
    class_membership,
    fs_distance,
    gaussian_packet,
    metric_relation_residual,
    tau_s_state,
)
from .gue import (
    GUEConfig,
    WalkConfig,
    WalkResult,
    WalkState,
    calibrate_scale,
    isotropy_statistic,
    registered_step_rms,
    run_walk,
    sample_gue,
    unitary_step,
)
from .dynamics import (
    ClassicalState,
    ParticleParams,
    PotentialSpec,
    decomposition_terms,
    ehrenfest_deviation,
    fs_velocity_norm2,
    newton_trajectory,
    split_step_propagate,
)

__version__ = "0.1.0"
