"""Saleh-Valenzuela multipath channel generation for a ULA-to-ULA link.

Path 0 is the dominant line-of-sight path; the remaining paths are weak
reflections.  The dense channel matrix is

    H = sqrt(n_a * m_a / L) * sum_i g_i * a(n_a, aoa_i) @ a(m_a, aod_i)^H

with a(.,.) the unit-norm steering vector.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .beamspace import steering_vector
from .errors import InvalidDimensionError


@dataclass(frozen=True)
class ChannelPath:
    gain: complex
    aoa: float
    aod: float


@dataclass(frozen=True)
class ChannelRealization:
    paths: tuple[ChannelPath, ...]
    matrix: np.ndarray
    n_a: int
    m_a: int


def channel_from_paths(paths, n_a: int, m_a: int) -> ChannelRealization:
    """Assemble the dense channel matrix from an explicit path list."""
    paths = tuple(paths)
    if not paths:
        raise InvalidDimensionError("a channel needs at least one path")
    h = np.zeros((n_a, m_a), dtype=complex)
    for p in paths:
        h += p.gain * np.outer(steering_vector(n_a, p.aoa), steering_vector(m_a, p.aod).conj())
    h *= np.sqrt(n_a * m_a / len(paths))
    return ChannelRealization(paths=paths, matrix=h, n_a=n_a, m_a=m_a)


def generate_channel(
    n_a: int,
    m_a: int,
    l: int,
    rng_seed,
    nlos_var: float = 0.01,
) -> ChannelRealization:
    """Draw a random realization with one CN(0,1) LOS path and l-1 weak paths.

    Physical angles are uniform on [-pi, pi]; normalized angles are their
    sines.  Identical seeds give bit-identical realizations.
    """
    if l < 1:
        raise InvalidDimensionError(f"path count must be positive, got {l}")
    rng = np.random.default_rng(rng_seed)
    sigmas = np.full(l, np.sqrt(nlos_var))
    sigmas[0] = 1.0
    gains = sigmas * (rng.standard_normal(l) + 1j * rng.standard_normal(l)) / np.sqrt(2.0)
    aoas = np.sin(rng.uniform(-np.pi, np.pi, size=l))
    aods = np.sin(rng.uniform(-np.pi, np.pi, size=l))
    paths = [ChannelPath(complex(g), float(a), float(d)) for g, a, d in zip(gains, aoas, aods)]
    return channel_from_paths(paths, n_a, m_a)


def los_truth(ch: ChannelRealization) -> tuple[float, float]:
    """Ground-truth (aoa, aod) of the dominant path."""
    return ch.paths[0].aoa, ch.paths[0].aod


def channel_to_dict(ch: ChannelRealization) -> dict:
    return {
        "paths": [
            {"re": p.gain.real, "im": p.gain.imag, "aoa": p.aoa, "aod": p.aod}
            for p in ch.paths
        ],
        "n_a": ch.n_a,
        "m_a": ch.m_a,
    }


def channel_from_dict(d: dict) -> ChannelRealization:
    paths = [ChannelPath(complex(p["re"], p["im"]), p["aoa"], p["aod"]) for p in d["paths"]]
    return channel_from_paths(paths, d["n_a"], d["m_a"])


def dump_channel(ch: ChannelRealization, path) -> None:
    with open(path, "w") as f:
        json.dump(channel_to_dict(ch), f)


def load_channel(path) -> ChannelRealization:
    with open(path) as f:
        return channel_from_dict(json.load(f))
