"""Pauli-level simulation toolkit for the extended Jaynes-Cummings model."""

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("artifact")
except PackageNotFoundError:
    __version__ = "0.0.0"

from .hamiltonian import build_interaction, build_schrodinger, term_counts
from .model import ModelParams, ParamError, load_params, uniform, validate
from .pauli import PauliString, PauliSum

__all__ = [
    "__version__",
    "ModelParams",
    "ParamError",
    "PauliString",
    "PauliSum",
    "build_interaction",
    "build_schrodinger",
    "load_params",
    "term_counts",
    "uniform",
    "validate",
]
