"""boundlab: Floquet stability of the driven pendulum and the bound or
localized states of finite-window oscillating potentials in 1D, 2D and 3D."""

from .accordion import (
    AccordionPotential,
    EigenResult,
    EnvelopeReport,
    WindowSpec,
    accordion_domain,
    build_potential,
    effective_potential,
    envelope_compare,
    shoot_eigenvalue,
)
from .bessel import BesselZeroTable, bessel_i0, bessel_j, bessel_k0, bessel_zeros
from .core import (
    CoefficientField,
    Grid,
    WaveSamples,
    bracket_root,
    count_sign_changes,
    derivative,
    integrate,
    numerov_propagate,
    ode_residual,
    rk_propagate_pair,
    simpson,
    wronskian_drift,
)
from .errors import (
    AnsatzError,
    BoundLabError,
    BracketError,
    DegenerateSamples,
    DependentSolutions,
    DomainError,
    EmptyBracket,
    PropagationDiverged,
    WrongStateIndex,
)
from .pendulum import (
    MonodromyResult,
    PendulumParams,
    Stability,
    StabilityChart,
    from_physical,
    kapitza_threshold,
    monodromy,
    stability_chart,
)
from .radial import (
    BunchingSeries,
    DensityReport,
    K0StateReport,
    PlanarCentrifugal,
    RadialPotential3D,
    ZeroEnergyResult,
    bunching_series,
    interior_extrema,
    k0_bound_state,
    localized_density_report,
    planar_free_state,
    radial_accordion,
    solve_radial_3d,
    square_well,
    tune_zero_energy,
)

__version__ = "0.1.0"
