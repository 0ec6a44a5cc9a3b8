"""Beamspace geometry shared by every scheme.

All angles are normalized spatial frequencies in [-1, 1]: a uniform linear
array with half-wavelength element spacing maps the physical angle x to
sin(x).  The K-point angle grid places point c at -1 + 2c/K (0-based), and
all grid indices in this package are 0-based.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import AngleDomainError, InvalidDimensionError, OversamplingError

# Tolerance for angles that drift past +/-1 by floating-point arithmetic.
_ANGLE_SLACK = 1e-9


def steering_vector(n: int, theta: float) -> np.ndarray:
    """Unit-norm response of an n-element ULA at normalized angle theta.

    Entry m is exp(-1j*pi*theta*m)/sqrt(n) for m = 0..n-1.
    """
    if n < 1:
        raise InvalidDimensionError(f"antenna count must be positive, got {n}")
    m = np.arange(n)
    return np.exp(-1j * np.pi * theta * m) / math.sqrt(n)


def sampling_matrix(n: int, k: int) -> np.ndarray:
    """n x k dictionary whose column c is steering_vector(n, -1 + 2c/k).

    Sampling the full beamspace [-1, 1] at K >= n points makes the rows
    orthogonal: columns @ columns^H = (k/n) * I_n.
    """
    if n < 1:
        raise InvalidDimensionError(f"antenna count must be positive, got {n}")
    if k < n:
        raise OversamplingError(f"grid size {k} must be at least the antenna count {n}")
    angles = -1.0 + 2.0 * np.arange(k) / k
    m = np.arange(n)
    return np.exp(-1j * np.pi * np.outer(m, angles)) / math.sqrt(n)


def grid_angle(index: int, k: int) -> float:
    """Angle of grid point `index` on the k-point grid."""
    return -1.0 + 2.0 * index / k


def quantize_angle(theta: float, k: int) -> int:
    """Nearest grid index to theta: round(k*(theta+1)/2) clamped to [0, k-1].

    Rounding ties go half away from zero.  theta outside [-1, 1] raises.
    """
    if theta < -1.0 - _ANGLE_SLACK or theta > 1.0 + _ANGLE_SLACK:
        raise AngleDomainError(f"angle {theta} outside [-1, 1]")
    x = k * (min(max(theta, -1.0), 1.0) + 1.0) / 2.0
    idx = int(math.floor(x + 0.5))
    return min(max(idx, 0), k - 1)


def beamspace_transform(h: np.ndarray, dn: np.ndarray, dm: np.ndarray) -> np.ndarray:
    """Project a channel matrix onto the angle grids: dn^H @ h @ dm."""
    if dn.shape[0] != h.shape[0] or dm.shape[0] != h.shape[1]:
        raise InvalidDimensionError(
            f"channel {h.shape} does not match dictionaries {dn.shape}, {dm.shape}"
        )
    if dn.shape[1] != dm.shape[1]:
        raise InvalidDimensionError(
            f"dictionaries must share the grid size, got {dn.shape[1]} and {dm.shape[1]}"
        )
    return dn.conj().T @ h @ dm
