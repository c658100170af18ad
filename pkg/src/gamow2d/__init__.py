"""gamow2d: perimeter-plus-repulsion energies for planar sets.

Evaluate the energy P(S) + eps * double-integral of a radial kernel over
S x S, check the kernel hypotheses behind it, measure how far sets are from
disks, and minimize the energy over Fourier-parametrized star shapes and
finite component splits.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: F401
    ConfigError,
    DomainError,
    FeasibilityError,
    InsufficientDataError,
    PreconditionError,
    QuadratureError,
    RangeError,
    ToolkitError,
)
from .kernels import (  # noqa: F401
    DIVERGENT,
    CheckReport,
    KernelSpec,
    admissibility_integral,
    check_decreasing,
    check_pd_fourier,
    check_pd_inequality,
    concentration_bound_phi,
    constant_kernel,
    eval_kernel,
    gauss_power_kernel,
    indicator_kernel,
    lipschitz_integral,
    potential_phi,
    power_kernel,
    tabulated_kernel,
)
from .shapes import (  # noqa: F401
    AsymmetryReport,
    RasterSet,
    StarShape,
    area,
    cross_section,
    disk,
    fraenkel_center,
    perimeter,
    rasterize,
    scale,
    symmetric_difference,
)
from .energy import (  # noqa: F401
    ComponentList,
    CutResult,
    EnergyBreakdown,
    cut_and_paste,
    disk_self_interaction,
    gamow_energy,
    generalized_energy,
    riesz_interaction,
    scaling_residual,
)
from .lens import (  # noqa: F401
    LensState,
    MinCurveResult,
    deficit_ratio,
    lens_derivatives,
    lens_from_area,
    lens_inequality_check,
    lens_state,
    min_curve_inner,
    min_curve_outer,
    mu_prime_at_flat,
)
from .minimize import (  # noqa: F401
    MinimizeTrace,
    OptimizerConfig,
    SweepResult,
    ball_minimality_test,
    epsilon_sweep,
    minimize_generalized,
    minimize_single,
    project_volume,
)
from ._core import BACKEND  # noqa: F401
