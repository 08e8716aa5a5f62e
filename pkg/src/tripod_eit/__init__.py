"""Double-EIT spectra of a four-level tripod atom.

Probe absorption and dispersion from the Lindblad steady state and from
closed-form weak-probe susceptibilities, plus the scans that compare them.
"""

__version__ = "0.1.0"

from .analytic import h0, h_full, h_two_lambda, lambda_exact, lambda_weak_probe  # noqa: E402
from .hamiltonian import (  # noqa: E402
    NumericalError,
    build_lambda_h,
    build_tripod_h,
    cubic_roots,
    eigensystem,
    find_dark_states,
)
from .liouville import (  # noqa: E402
    DEFAULT_MODEL,
    build_liouvillian,
    collapse_channels,
    evolve,
    probe_response,
    steady_state,
)
from .model import LambdaParams, ParameterError, TripodParams, validate_params  # noqa: E402
from .spectra import analyze_windows, scan_2d, sweep_delta_c  # noqa: E402

__all__ = [
    "DEFAULT_MODEL",
    "LambdaParams",
    "NumericalError",
    "ParameterError",
    "TripodParams",
    "analyze_windows",
    "build_lambda_h",
    "build_liouvillian",
    "build_tripod_h",
    "collapse_channels",
    "cubic_roots",
    "eigensystem",
    "evolve",
    "find_dark_states",
    "h0",
    "h_full",
    "h_two_lambda",
    "lambda_exact",
    "lambda_weak_probe",
    "probe_response",
    "scan_2d",
    "steady_state",
    "sweep_delta_c",
    "validate_params",
]
