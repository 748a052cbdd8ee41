"""Finite extended CMV matrices with random Verblunsky coefficients.

Determinants, transfer matrices, Green's functions, Lyapunov and
large-deviation estimates, and Monte Carlo localisation experiments.
"""
from .errors import CMVError, DomainError, NumericalFailure, ParameterError, SingularSystemError
from .model import *  # noqa: F401,F403
from .cmv_core import *  # noqa: F401,F403
from .determinants import *  # noqa: F401,F403
from .transfer import *  # noqa: F401,F403
from .lyapunov_ldt import *  # noqa: F401,F403
from .spectra import *  # noqa: F401,F403
from .localization import *  # noqa: F401,F403
from .verify import CheckReport, run_correction_suite, run_identity_suite
from .cli import run

__version__ = "0.1.0"
