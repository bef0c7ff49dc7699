"""Balanced two-population stochastic network: exact and tau-leap simulators,
hydrodynamic-limit integration, balance-manifold tools and convergence
diagnostics."""

from .backend import active_backend
from .config import EXPERIMENTS, load_params, paper_params, parse_params, write_params
from .empirics import (ConvergenceRow, convergence_study, sup_error,
                       wasserstein1_to_gaussian)
from .errors import (BalancedNetError, GridMismatchError, NoRootError,
                     SingularJacobianError)
from .fluctuations import (CompensatedPath, check_moc_concentration,
                           check_tail_bound, modulus_of_continuity,
                           simulate_compensated, sup_abs_deviation)
from .limit_ode import LimitTrajectory, detect_eta, integrate_limit, limit_rhs
from .manifold import ManifoldReport, classify, solve_balance
from .model import (CHANNELS, CustomRate, FiringRate, MacroState, MicroState,
                    NetworkParams, TanhAffine, constant_rate, firing_rate_eval,
                    init_micro, macro_of_micro)
from .quadrature import (QuadratureRule, balance_residual, gauss_expect,
                         gauss_hermite, gaussian_density, jacobian_K,
                         jacobian_v, variance_drive)
from .simulate import (MacroSeries, SimConfig, Trajectory, empirical_trajectory,
                       simulate, simulate_exact, simulate_fixed)

__version__ = "0.1.0"
