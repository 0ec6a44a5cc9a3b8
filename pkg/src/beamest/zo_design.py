"""Zero-off-diagonal gram designs and their factorizations.

Both schemes fix the gram matrices F F^H and W^H W to be diagonal with a
constant value on an `active`-element support, which keeps the quadratic
form a^H G a constant over all steering vectors and removes off-diagonal
interference from the beamspace profile.  The two supported layouts differ
only in where the support sits:

* scattered     - support spread uniformly at stride dim/active; the lobe
                  profile becomes periodic, so a codebook search must pick
                  the main lobe first,
* concentrated  - support packed at the top-left; the main lobe is unique
                  and a direct peak search works.

Factoring the gram back into an effective precoder/combiner uses the
canonical scaled-standard-basis factor, which makes the shut-down antenna
ports explicit.  The factors intentionally bypass the phase-shifter grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .beamspace import grid_angle, steering_vector
from .errors import DivisibilityError, InvalidDimensionError

SCATTERED = "scattered"
CONCENTRATED = "concentrated"


@dataclass(frozen=True)
class ZoGram:
    dim: int
    active: int
    layout: str
    scale: float
    matrix: np.ndarray


def build_zo_gram(dim: int, active: int, layout: str, gamma: float = 1.0) -> ZoGram:
    """Diagonal gram with `active` entries equal to gamma*sqrt(dim/active)."""
    if active < 1 or active > dim:
        raise InvalidDimensionError(f"active count {active} must be in [1, {dim}]")
    if layout == SCATTERED:
        if dim % active != 0:
            raise DivisibilityError(f"scattered layout needs active ({active}) to divide dim ({dim})")
        support = np.arange(active) * (dim // active)
    elif layout == CONCENTRATED:
        support = np.arange(active)
    else:
        raise ValueError(f"layout must be {SCATTERED!r} or {CONCENTRATED!r}, got {layout!r}")
    scale = gamma * math.sqrt(dim / active)
    matrix = np.zeros((dim, dim), dtype=complex)
    matrix[support, support] = scale
    return ZoGram(dim=dim, active=active, layout=layout, scale=scale, matrix=matrix)


def support_indices(g: ZoGram) -> np.ndarray:
    if g.layout == SCATTERED:
        return np.arange(g.active) * (g.dim // g.active)
    return np.arange(g.active)


def factor_gram(g: ZoGram, orientation: str = "precoder") -> np.ndarray:
    """Canonical factor of the diagonal gram.

    precoder orientation: X (dim x active) with X @ X^H = g.matrix;
    combiner orientation: X (active x dim) with X^H @ X = g.matrix.
    Rows/columns outside the support stay exactly zero (ports shut down).
    """
    support = support_indices(g)
    x = np.zeros((g.dim, g.active), dtype=complex)
    x[support, np.arange(g.active)] = math.sqrt(g.scale)
    if orientation == "precoder":
        return x
    if orientation == "combiner":
        return x.conj().T
    raise ValueError(f"orientation must be 'precoder' or 'combiner', got {orientation!r}")


def predicted_lobe_magnitude(g: ZoGram, k_index: int, truth_angle: float, k: int) -> float:
    """Noiseless lobe profile |a(dim, grid_angle(k_index))^H @ G @ a(dim, truth)|."""
    left = steering_vector(g.dim, grid_angle(k_index, k))
    right = steering_vector(g.dim, truth_angle)
    return float(abs(left.conj() @ g.matrix @ right))


def lobe_profile(g: ZoGram, truth_angle: float, k: int) -> np.ndarray:
    """Noiseless profile over the whole k-point grid (vectorized)."""
    support = support_indices(g)
    angles = -1.0 + 2.0 * np.arange(k) / k
    # |sum over support of scale * exp(j*pi*(grid - truth)*i)| / dim
    phases = np.exp(1j * np.pi * np.outer(angles - truth_angle, support))
    return np.abs(phases.sum(axis=1)) * g.scale / g.dim
