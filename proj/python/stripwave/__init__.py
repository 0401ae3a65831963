"""Homogenization toolkit for a waveguide with frequently alternating
boundary conditions: homogenized Robin eigenvalues, boundary-layer functions,
the boundary corrector, the bottom-of-spectrum series, and a finite-element
eigensolver for the periodicity cell."""

from ._stripwave import *  # noqa: F401,F403
