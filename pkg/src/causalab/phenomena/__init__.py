"""Dataset generators and loaders for the four case studies."""

from .ldr import load_ldr_dataset
from .ohm import generate_ohm_dataset
from .quantum import (
    build_entanglement_dataset,
    correlation,
    log_negativity,
    measure_zz,
    random_density_matrix,
)
from .tides import load_tide_dataset

__all__ = [
    "generate_ohm_dataset",
    "load_tide_dataset",
    "load_ldr_dataset",
    "random_density_matrix",
    "log_negativity",
    "measure_zz",
    "correlation",
    "build_entanglement_dataset",
]
