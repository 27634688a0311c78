"""Product-of-exponentials (Wei-Norman) coordinates for driven SU(N) dynamics."""
from .lie_core import LieBasis, adjoint_matrix, build_su_basis, expm, structure_constants
from .propagator import apply, integrate_unitary, pexp, phase_distance, product_of_exponentials
from .schedule import ControlSchedule, PiecewiseControl, time_grid
from .state_analysis import in_gamma_isotropy, in_state_isotropy, universality_check
from .su2_zyz import spin_half_model, u_zyz, xi_inv_zyz, xi_zyz
from .wei_norman import (
    EPS_SING,
    ZYZ,
    ChartPolicy,
    GammaChart,
    SingularChart,
    UnrecoverableSingularity,
    assemble_xi,
    canonical_order,
    integrate_gamma,
    reduced_dynamics_step,
    solve_gamma_dot,
    wrap_gamma,
    xi_determinant,
)

__version__ = "0.1.0"
