"""viscowave: spectral decay diagnostics for incompressible viscoelastic flow."""

__version__ = "0.1.0"

from .grid import Grid
from .fields import (
    SpectralVectorField,
    SpectralTensorField,
    to_spectral,
    to_physical,
    save_field,
    load_field,
)
from .operators import (
    CutoffProfile,
    leray_project,
    q_project,
    grad,
    div_tensor,
    div_vector,
    curl,
    dealias,
    split_low_high,
)
from .semigroup import EigenPair, Amplitudes, eigenpair, amplitudes, wave_form_B, propagate_exact

__all__ = [
    "__version__",
    "Grid",
    "SpectralVectorField",
    "SpectralTensorField",
    "to_spectral",
    "to_physical",
    "save_field",
    "load_field",
    "CutoffProfile",
    "leray_project",
    "q_project",
    "grad",
    "div_tensor",
    "div_vector",
    "curl",
    "dealias",
    "split_low_high",
    "EigenPair",
    "Amplitudes",
    "eigenpair",
    "amplitudes",
    "wave_form_B",
    "propagate_exact",
]
