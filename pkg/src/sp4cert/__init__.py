"""Transfer matrices, density certificates and Lyapunov spectra for a
two-channel Bernoulli-Anderson model on the line."""

__version__ = "0.1.0"

from ._accel import BACKEND
from .certify import CertifyConfig, certify_energy, cross_validate, sweep
from .diophantine import power_in_neighborhood, simultaneous_approx
from .liealg import lie_closure_rank, paper_certificate_path, principal_log_power
from .lyapunov import RngSeed, estimate_spectrum, separation_report, symmetry_defect
from .model import CONFIGS, BernoulliConfig, generator_set, transfer_matrix

__all__ = [
    "BACKEND", "BernoulliConfig", "CONFIGS", "CertifyConfig", "RngSeed",
    "certify_energy", "cross_validate", "estimate_spectrum", "generator_set",
    "lie_closure_rank", "paper_certificate_path", "power_in_neighborhood",
    "principal_log_power", "separation_report", "simultaneous_approx", "sweep",
    "symmetry_defect", "transfer_matrix",
]
