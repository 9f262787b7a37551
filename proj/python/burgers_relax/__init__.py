"""Relaxation tensor of the extended Burgers model.

Tensors are Kelvin matrices: slot order (11, 22, 33, 23, 13, 12) in 3D and
(11, 22, 12) in 2D, shear slots weighted by sqrt(2).
"""

from ._core import (
    BurgersError,
    Evaluator,
    Material,
    PronyForm,
    certificate,
    isotropic,
    kelvin_size,
    load_config,
    parse_config,
    respond,
    simulate,
)

__all__ = [
    "BurgersError",
    "Evaluator",
    "Material",
    "PronyForm",
    "certificate",
    "isotropic",
    "kelvin_size",
    "load_config",
    "parse_config",
    "respond",
    "simulate",
]
