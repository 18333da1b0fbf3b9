"""The three-level, two-operator channel family on which subselection fails."""

import math

import numpy as np

from .channels import KrausChannel, validate_channel
from .errors import IncompleteChannel
from .hermitian import DensityMatrix, incoherent_state, validate_density

NORM_TOL = 1e-10


def counterexample_channel(a: complex, b: complex) -> KrausChannel:
    """
    K₁ = [[0,1,0],[0,0,0],[0,0,a]], K₂ = [[1,0,0],[0,0,b],[0,0,0]].

    Raises
    ------
    IncompleteChannel
        If |a|² + |b|² differs from 1 by more than 1e-10
    """
    norm = abs(a) ** 2 + abs(b) ** 2
    if abs(norm - 1.0) > NORM_TOL:
        raise IncompleteChannel(f"|a|² + |b|² = {norm:.12g}, expected 1")
    k1 = np.array([[0, 1, 0], [0, 0, 0], [0, 0, a]], dtype=np.complex128)
    k2 = np.array([[1, 0, 0], [0, 0, b], [0, 0, 0]], dtype=np.complex128)
    return validate_channel([k1, k2], tol=NORM_TOL)


def counterexample_state() -> DensityMatrix:
    """(1/4)[[1,0,1],[0,2,0],[1,0,1]]."""
    return validate_density(np.array([[1, 0, 1], [0, 2, 0], [1, 0, 1]]) / 4.0)


def counterexample_reference_sigma() -> DensityMatrix:
    """diag(1, √2, 1)/(2 + √2), the optimal incoherent state of counterexample_state at α = 2."""
    root = math.sqrt(2.0)
    return incoherent_state(np.array([1.0, root, 1.0]) / (2.0 + root))
