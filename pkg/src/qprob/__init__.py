"""Classical and quantum probability side by side.

Born rule and Lüders update, the quantum formula of total probability with
its interference term, CHSH and local incompatibility, indirect measurement
models, GKSL dynamics, frequency sampling and the lattice of projectors.
"""
from .classical import (
    FiniteProbabilitySpace,
    JointDistribution,
    RandomVariable,
    bayes_conditional,
    classical_ftp,
    event_probability,
    joint_distribution,
    marginal,
)
from .errors import QProbError
from .quantum import (
    HermitianObservable,
    QuantumState,
    born_probability,
    conditional_probability,
    jpd_for_compatible,
    luders_update,
    quantum_ftp,
)

__version__ = "0.1.0"

__all__ = [
    "FiniteProbabilitySpace",
    "HermitianObservable",
    "JointDistribution",
    "QProbError",
    "QuantumState",
    "RandomVariable",
    "bayes_conditional",
    "born_probability",
    "classical_ftp",
    "conditional_probability",
    "event_probability",
    "joint_distribution",
    "jpd_for_compatible",
    "luders_update",
    "marginal",
    "quantum_ftp",
]
