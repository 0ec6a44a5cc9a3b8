"""Integration-based hierarchical codebook and coarse beam training.

Layer s of the codebook for an n-element array (n a power of two) holds
2**s codewords; codeword c covers the angle cell
[-1 + c/2**(s-1), -1 + (c+1)/2**(s-1)].  Each codeword is the integral of
the steering vector over its cell, which has the closed form

    entry 0    = (1/sqrt(n)) * 1/2**(s-1)
    entry m>=1 = (1/sqrt(n)) * (j/(pi*m)) * exp(-j*pi*m*w2) * (1 - exp(j*pi*m/2**(s-1)))

with w2 the cell's upper bound.

Beam training descends both codebooks jointly: on every shared layer the
two children of each side's current cell are paired (4 measurements), the
highest-energy pair wins; the side with more layers then continues its
binary descent alone (2 measurements per layer) while the other side keeps
its final codeword.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization
from .errors import InvalidDimensionError


@dataclass(frozen=True)
class HierarchicalCodebook:
    n: int
    layers: tuple[np.ndarray, ...]  # layers[s-1] has shape (2**s, n)

    @property
    def depth(self) -> int:
        return len(self.layers)

    def codeword(self, s: int, c: int) -> np.ndarray:
        return self.layers[s - 1][c]


@dataclass(frozen=True)
class CoarseEstimate:
    n_w: int  # BS-side last-layer codeword index (0-based)
    n_f: int  # user-side last-layer codeword index (0-based)
    aoa_interval: tuple[float, float]
    aod_interval: tuple[float, float]
    measurements: int


def coverage(s: int, c: int) -> tuple[float, float]:
    """Angle cell of codeword c (0-based) in layer s."""
    half = 2.0 ** (s - 1)
    return (-1.0 + c / half, -1.0 + (c + 1) / half)


def build_codebook(n: int) -> HierarchicalCodebook:
    """Closed-form codebook for an n-element array; n must be a power of two."""
    if n < 2 or (n & (n - 1)) != 0:
        raise InvalidDimensionError(f"codebook needs a power-of-two antenna count, got {n}")
    depth = int(math.log2(n))
    m = np.arange(1, n)
    layers = []
    for s in range(1, depth + 1):
        half = 2.0 ** (s - 1)
        words = np.empty((2**s, n), dtype=complex)
        for c in range(2**s):
            w2 = -1.0 + (c + 1) / half
            words[c, 0] = 1.0 / half
            words[c, 1:] = (1j / (np.pi * m)) * np.exp(-1j * np.pi * m * w2) * (
                1.0 - np.exp(1j * np.pi * m / half)
            )
        layers.append(words / math.sqrt(n))
    return HierarchicalCodebook(n=n, layers=tuple(layers))


def _measure(w: np.ndarray, f: np.ndarray, h: np.ndarray, noise_var: float, rng) -> float:
    """Received energy |w^H H f + noise|^2 with combiner-shaped noise."""
    y = w.conj() @ h @ f
    if noise_var > 0:
        sigma = math.sqrt(noise_var / 2.0) * np.linalg.norm(w)
        y = y + sigma * (rng.standard_normal() + 1j * rng.standard_normal())
    return float(abs(y) ** 2)


def beam_train(
    ch: ChannelRealization,
    cb_bs: HierarchicalCodebook,
    cb_ue: HierarchicalCodebook,
    noise_var: float = 0.0,
    rng_seed=0,
) -> CoarseEstimate:
    """Locate the last-layer cells covering the dominant path's angles."""
    if cb_bs.n != ch.n_a or cb_ue.n != ch.m_a:
        raise InvalidDimensionError(
            f"codebook sizes ({cb_bs.n}, {cb_ue.n}) do not match the array ({ch.n_a}, {ch.m_a})"
        )
    rng = np.random.default_rng(rng_seed)
    h = ch.matrix
    shared = min(cb_bs.depth, cb_ue.depth)
    cell_bs = 0
    cell_ue = 0
    measurements = 0
    for s in range(1, shared + 1):
        bs_children = (2 * cell_bs, 2 * cell_bs + 1)
        ue_children = (2 * cell_ue, 2 * cell_ue + 1)
        energies = np.empty((2, 2))
        for i, bi in enumerate(bs_children):
            for j, uj in enumerate(ue_children):
                energies[i, j] = _measure(
                    cb_bs.codeword(s, bi), cb_ue.codeword(s, uj), h, noise_var, rng
                )
                measurements += 1
        best = int(np.argmax(energies))
        cell_bs = bs_children[best // 2]
        cell_ue = ue_children[best % 2]
    # The deeper side continues alone against the other side's final codeword.
    if cb_bs.depth > shared:
        f = cb_ue.codeword(shared, cell_ue)
        for s in range(shared + 1, cb_bs.depth + 1):
            children = (2 * cell_bs, 2 * cell_bs + 1)
            e = [_measure(cb_bs.codeword(s, c), f, h, noise_var, rng) for c in children]
            measurements += 2
            cell_bs = children[int(np.argmax(e))]
    elif cb_ue.depth > shared:
        w = cb_bs.codeword(shared, cell_bs)
        for s in range(shared + 1, cb_ue.depth + 1):
            children = (2 * cell_ue, 2 * cell_ue + 1)
            e = [_measure(w, cb_ue.codeword(s, c), h, noise_var, rng) for c in children]
            measurements += 2
            cell_ue = children[int(np.argmax(e))]
    return CoarseEstimate(
        n_w=cell_bs,
        n_f=cell_ue,
        aoa_interval=coverage(cb_bs.depth, cell_bs),
        aod_interval=coverage(cb_ue.depth, cell_ue),
        measurements=measurements,
    )


def codebook_to_dict(cb: HierarchicalCodebook) -> dict:
    return {
        "n": cb.n,
        "layers": [
            [[[float(v.real), float(v.imag)] for v in word] for word in layer]
            for layer in cb.layers
        ],
    }


def dump_codebook(cb: HierarchicalCodebook, path) -> None:
    with open(path, "w") as f:
        json.dump(codebook_to_dict(cb), f)


def beam_pattern(word: np.ndarray, angles: np.ndarray) -> np.ndarray:
    """Magnitude response |c^H a(n, angle)| over the given angles."""
    n = word.shape[0]
    steering = np.exp(-1j * np.pi * np.outer(np.arange(n), angles)) / math.sqrt(n)
    return np.abs(word.conj() @ steering)
