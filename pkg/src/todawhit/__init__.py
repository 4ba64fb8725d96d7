"""Whittaker functions of classical Toda chains.

Integral representations in factorized and Givental-type coordinates,
recursion kernels and elementary intertwiners between root systems, affine
Baxter Q-operator kernels, and the verification machinery tying them all
together.
"""

from .rootdata import Family, RootSystem, build

__all__ = ["Family", "RootSystem", "build"]
__version__ = "0.1.0"
