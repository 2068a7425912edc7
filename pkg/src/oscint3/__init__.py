"""Leading-order asymptotics of 3D oscillatory integrals with singular
amplitudes, validated against independent quadrature oracles."""

from . import asym, cli, core, detect, kelvin, oracle, problems

__all__ = ["asym", "cli", "core", "detect", "kelvin", "oracle", "problems"]
__version__ = "0.1.0"
