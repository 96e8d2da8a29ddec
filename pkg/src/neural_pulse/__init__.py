"""Traveling fronts and fast pulses of a Heaviside neural field with linear feedback."""

from .config import RunConfig
from .eigen import EigenPair, compute_eigen, eigen_derivatives_at_zero
from .errors import (ConfigError, ConsistencyError, DomainError, FormatError,
                     FrontExistenceError, HypothesisError, NeuralPulseError, NumericalError,
                     ParameterError, RegimeError, SolveError, VerificationError)
from .front import (FrontSolution, back_profile, evans_front, front_profile, phi_f,
                    phi_f_prime, solve_front_speed)
from .jacobian import JacobianAtBase, jacobian_at_base, partials_f, partials_g
from .kernels import (KernelSpec, check_hypotheses, kernel_from_config,
                      make_damped_oscillatory_kernel, make_exponential_kernel,
                      make_table_kernel)
from .pulse import (ModelParams, PulseSolution, WaveParams, base_point, pulse_profile,
                    solve_pulse, speed_index_f, speed_index_g)
from .simulator import (FieldState, GridConfig, initial_bump, run_pulse_experiment,
                        step)
from .verification import (VerificationReport, build_singular_orbit, hausdorff_distance,
                           region_closeness, sample_pulse_orbit, verify_pulse,
                           verify_threshold_pattern)

__version__ = "0.1.0"
