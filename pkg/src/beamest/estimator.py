"""Pilot-phase simulation and the two-stage peak search.

The measurement matrix is R = W @ H @ F + N~ with W the stacked combiner
(t_3 x n_a), F the effective precoder (m_a x t_1) and N~ combiner-shaped
noise, one independent draw per (precoding slot, combining slot).  The
over-sampled beamspace surface

    B[p, q] = d_N(p)^H @ W^H @ R @ F^H @ d_M(q)

is never materialized; entries are evaluated lazily at O(t_3*n_a + t_1*m_a)
cost each, and every evaluation is counted on the measurement's telemetry.

Stage 1 projects R onto the coarse (non-oversampled) grids and brackets the
main lobe with the highest-energy pair of adjacent rows/columns.  Stage 2
shrinks the bracket by thirds, probing the four points that split it (two
per axis once one axis has converged), always deleting the third adjacent
to the smallest probe.  Once an axis's probes collide on the grid the axis
is frozen, and the few grid points left in the final bracket are compared
directly, so the search lands exactly on the bracketed grid argmax.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .beamspace import grid_angle, quantize_angle, sampling_matrix, steering_vector
from .channel import ChannelRealization
from .codebook import HierarchicalCodebook, beam_train
from .errors import InvalidDimensionError
from .ia_design import HybridCombiner, HybridPrecoder
from .zo_design import CONCENTRATED, SCATTERED, ZoGram, factor_gram

SCHEME_IA = "ia"
SCHEME_SZO = "szo"
SCHEME_CZO = "czo"
SCHEME_RANDOM = "random"
SCHEME_EXHAUSTIVE = "exhaustive"


@dataclass
class MeasurementMatrix:
    data: np.ndarray      # (t_3, t_1)
    combiner: np.ndarray  # (t_3, n_a) stacked W
    precoder: np.ndarray  # (m_a, t_1) effective F
    user: int = 0
    entry_evaluations: int = 0


@dataclass(frozen=True)
class SearchRegion:
    gamma: tuple[float, float]    # AoA interval
    upsilon: tuple[float, float]  # AoD interval


@dataclass(frozen=True)
class AngleEstimate:
    aoa_hat: float
    aod_hat: float
    entry_evaluations: int
    scheme: str


def _stacked(w) -> np.ndarray:
    return w.stacked if isinstance(w, HybridCombiner) else np.asarray(w)


def _effective(f) -> np.ndarray:
    return f.effective if isinstance(f, HybridPrecoder) else np.asarray(f)


def simulate_pilot_phase(
    ch: ChannelRealization,
    w,
    f,
    noise_var: float = 0.0,
    rng_seed=0,
    n_r: int | None = None,
    user: int = 0,
) -> MeasurementMatrix:
    """Measured R = W @ H @ F + N~ after pilot despreading.

    Orthogonal per-user pilots cancel multi-user interference exactly, so a
    single user's measurement is simulated in isolation.  Noise is drawn
    independently per combining slot of n_r rows (n_r defaults to the slot
    height of a designed combiner, or to t_3 for a monolithic matrix).
    """
    w_mat = _stacked(w)
    f_mat = _effective(f)
    t_3 = w_mat.shape[0]
    if w_mat.shape[1] != ch.n_a or f_mat.shape[0] != ch.m_a:
        raise InvalidDimensionError(
            f"designs ({w_mat.shape}, {f_mat.shape}) do not match the channel ({ch.n_a}, {ch.m_a})"
        )
    if n_r is None:
        n_r = w_mat.shape[0] // len(w.slots) if isinstance(w, HybridCombiner) else t_3
    if t_3 % n_r != 0:
        raise InvalidDimensionError(f"slot height {n_r} must divide t_3 = {t_3}")
    data = w_mat @ ch.matrix @ f_mat
    if noise_var > 0:
        rng = np.random.default_rng(rng_seed)
        t_1 = f_mat.shape[1]
        t_2 = t_3 // n_r
        sigma = math.sqrt(noise_var / 2.0)
        raw = sigma * (
            rng.standard_normal((t_2, ch.n_a, t_1)) + 1j * rng.standard_normal((t_2, ch.n_a, t_1))
        )
        noise = np.vstack([w_mat[b * n_r : (b + 1) * n_r, :] @ raw[b] for b in range(t_2)])
        data = data + noise
    return MeasurementMatrix(data=data, combiner=w_mat, precoder=f_mat, user=user)


def beamspace_entry(m: MeasurementMatrix, p: int, q: int, k: int) -> complex:
    """Entry (p, q) of the over-sampled beamspace surface, computed lazily."""
    left = m.combiner @ steering_vector(m.combiner.shape[1], grid_angle(p, k))
    right = m.precoder.conj().T @ steering_vector(m.precoder.shape[0], grid_angle(q, k))
    m.entry_evaluations += 1
    return complex(left.conj() @ m.data @ right)


def _entry_block(m: MeasurementMatrix, p_idx: np.ndarray, q_idx: np.ndarray, k: int) -> np.ndarray:
    """|B[p, q]| over an index rectangle; counts len(p)*len(q) evaluations."""
    n_a = m.combiner.shape[1]
    m_a = m.precoder.shape[0]
    left = np.exp(1j * np.pi * np.outer(-1.0 + 2.0 * p_idx / k, np.arange(n_a))) / math.sqrt(n_a)
    right = np.exp(-1j * np.pi * np.outer(np.arange(m_a), -1.0 + 2.0 * q_idx / k)) / math.sqrt(m_a)
    core = m.combiner.conj().T @ m.data @ m.precoder.conj().T
    m.entry_evaluations += len(p_idx) * len(q_idx)
    return np.abs(left @ core @ right)


def stage1_main_lobe(m: MeasurementMatrix) -> SearchRegion:
    """Bracket the main lobe on the coarse grids.

    Projects the measurement onto the n_a- and m_a-point grids and picks the
    adjacent row pair and column pair with the largest Frobenius norm; the
    returned intervals extend half a coarse cell beyond the winning pair
    (clamped to [-1, 1]), so each has width 4/n (at the edges slightly
    less).  Ties go to the lower index.
    """
    n_a = m.combiner.shape[1]
    m_a = m.precoder.shape[0]
    dn = sampling_matrix(n_a, n_a)
    dm = sampling_matrix(m_a, m_a)
    coarse = dn.conj().T @ (m.combiner.conj().T @ m.data @ m.precoder.conj().T) @ dm
    power = np.abs(coarse) ** 2
    col_pair = power.sum(axis=0)[:-1] + power.sum(axis=0)[1:]
    row_pair = power.sum(axis=1)[:-1] + power.sum(axis=1)[1:]
    s_q = int(np.argmax(col_pair))
    s_p = int(np.argmax(row_pair))
    gamma = (max(-1.0, -1.0 + (2 * s_p - 1) / n_a), min(1.0, -1.0 + (2 * s_p + 3) / n_a))
    upsilon = (max(-1.0, -1.0 + (2 * s_q - 1) / m_a), min(1.0, -1.0 + (2 * s_q + 3) / m_a))
    return SearchRegion(gamma=gamma, upsilon=upsilon)


def _candidates(lo: float, hi: float, k: int) -> np.ndarray:
    """Grid indices inside [lo, hi], falling back to the nearest point."""
    first = int(math.ceil(k * (lo + 1.0) / 2.0 - 1e-12))
    last = int(math.floor(k * (hi + 1.0) / 2.0 + 1e-12))
    first = max(first, 0)
    last = min(last, k - 1)
    if last < first:
        return np.array([quantize_angle(0.5 * (lo + hi), k)])
    return np.arange(first, last + 1)


def stage2_trichotomy(
    m: MeasurementMatrix, region: SearchRegion, k: int, scheme: str = SCHEME_IA
) -> AngleEstimate:
    """Shrink the bracket by thirds down to grid resolution, then snap.

    Probes the four third-points of the rectangle, finds the smallest
    magnitude and deletes the adjacent third on each axis (two probes per
    iteration once only one axis is open; ties keep the lowest probe
    index).  An axis whose probes quantize to the same grid point is frozen
    at grid resolution.  The few grid points remaining in the final bracket
    are compared directly and the argmax is returned.
    """
    two_k = 2.0 / k
    g_lo, g_hi = region.gamma
    u_lo, u_hi = region.upsilon
    start = m.entry_evaluations
    if (g_hi - g_lo) <= two_k and (u_hi - u_lo) <= two_k:
        return AngleEstimate(
            aoa_hat=grid_angle(quantize_angle(g_lo, k), k),
            aod_hat=grid_angle(quantize_angle(u_lo, k), k),
            entry_evaluations=0,
            scheme=scheme,
        )

    g_open = (g_hi - g_lo) > two_k
    u_open = (u_hi - u_lo) > two_k
    while g_open or u_open:
        if g_open:
            ga, gb = (2 * g_lo + g_hi) / 3.0, (g_lo + 2 * g_hi) / 3.0
            pa, pb = quantize_angle(ga, k), quantize_angle(gb, k)
            if pa == pb:
                g_open = False
        if u_open:
            ua, ub = (2 * u_lo + u_hi) / 3.0, (u_lo + 2 * u_hi) / 3.0
            qa, qb = quantize_angle(ua, k), quantize_angle(ub, k)
            if qa == qb:
                u_open = False
        if g_open and u_open:
            probes = (
                abs(beamspace_entry(m, pa, qa, k)),
                abs(beamspace_entry(m, pa, qb, k)),
                abs(beamspace_entry(m, pb, qa, k)),
                abs(beamspace_entry(m, pb, qb, k)),
            )
            worst = int(np.argmin(probes))
            if worst == 0:
                g_lo, u_lo = ga, ua
            elif worst == 1:
                g_lo, u_hi = ga, ub
            elif worst == 2:
                g_hi, u_lo = gb, ua
            else:
                g_hi, u_hi = gb, ub
        elif u_open:
            p_fix = quantize_angle(g_lo, k)
            if abs(beamspace_entry(m, p_fix, qa, k)) <= abs(beamspace_entry(m, p_fix, qb, k)):
                u_lo = ua
            else:
                u_hi = ub
        elif g_open:
            q_fix = quantize_angle(u_lo, k)
            if abs(beamspace_entry(m, pa, q_fix, k)) <= abs(beamspace_entry(m, pb, q_fix, k)):
                g_lo = ga
            else:
                g_hi = gb
        g_open = g_open and (g_hi - g_lo) > two_k
        u_open = u_open and (u_hi - u_lo) > two_k

    p_cands = _candidates(g_lo, g_hi, k)
    q_cands = _candidates(u_lo, u_hi, k)
    block = _entry_block(m, p_cands, q_cands, k)
    i, j = np.unravel_index(int(np.argmax(block)), block.shape)
    return AngleEstimate(
        aoa_hat=grid_angle(int(p_cands[i]), k),
        aod_hat=grid_angle(int(q_cands[j]), k),
        entry_evaluations=m.entry_evaluations - start,
        scheme=scheme,
    )


def exhaustive_argmax(
    m: MeasurementMatrix, region: SearchRegion, k: int, scheme: str = SCHEME_EXHAUSTIVE
) -> AngleEstimate:
    """Brute-force |B| argmax over every grid point inside the region."""
    start = m.entry_evaluations
    p_cands = _candidates(*region.gamma, k)
    q_cands = _candidates(*region.upsilon, k)
    block = _entry_block(m, p_cands, q_cands, k)
    i, j = np.unravel_index(int(np.argmax(block)), block.shape)
    return AngleEstimate(
        aoa_hat=grid_angle(int(p_cands[i]), k),
        aod_hat=grid_angle(int(q_cands[j]), k),
        entry_evaluations=m.entry_evaluations - start,
        scheme=scheme,
    )


FULL_REGION = SearchRegion(gamma=(-1.0, 1.0), upsilon=(-1.0, 1.0))


def estimate_ia(
    ch: ChannelRealization,
    w,
    f,
    noise_var: float,
    k: int,
    rng_seed=0,
    scheme: str = SCHEME_IA,
) -> AngleEstimate:
    """Identity-approximation pipeline: pilots, coarse bracket, trichotomy."""
    m = simulate_pilot_phase(ch, w, f, noise_var, rng_seed)
    region = stage1_main_lobe(m)
    return stage2_trichotomy(m, region, k, scheme=scheme)


def estimate_czo(
    ch: ChannelRealization,
    w_gram: ZoGram,
    f_gram: ZoGram,
    noise_var: float,
    k: int,
    rng_seed=0,
    n_r: int | None = None,
) -> AngleEstimate:
    """Concentrated-support pipeline; the unique main lobe allows stage 1."""
    if w_gram.layout != CONCENTRATED or f_gram.layout != CONCENTRATED:
        raise InvalidDimensionError("estimate_czo needs concentrated grams")
    w = factor_gram(w_gram, orientation="combiner")
    f = factor_gram(f_gram, orientation="precoder")
    m = simulate_pilot_phase(ch, w, f, noise_var, rng_seed, n_r=n_r)
    region = stage1_main_lobe(m)
    return stage2_trichotomy(m, region, k, scheme=SCHEME_CZO)


def estimate_szo(
    ch: ChannelRealization,
    w_gram: ZoGram,
    f_gram: ZoGram,
    cb_bs: HierarchicalCodebook,
    cb_ue: HierarchicalCodebook,
    noise_var: float,
    k: int,
    rng_seed=0,
    n_r: int | None = None,
) -> AngleEstimate:
    """Scattered-support pipeline: codebook training then trichotomy only.

    The periodic lobe profile makes the coarse bracket of stage 1
    ambiguous, so the main lobe comes from beam training and only the
    refinement stage runs, over the winning codewords' coverage cells.
    """
    if w_gram.layout != SCATTERED or f_gram.layout != SCATTERED:
        raise InvalidDimensionError("estimate_szo needs scattered grams")
    rng = np.random.default_rng(rng_seed)
    coarse = beam_train(ch, cb_bs, cb_ue, noise_var, rng)
    w = factor_gram(w_gram, orientation="combiner")
    f = factor_gram(f_gram, orientation="precoder")
    m = simulate_pilot_phase(ch, w, f, noise_var, rng, n_r=n_r)
    region = SearchRegion(gamma=coarse.aoa_interval, upsilon=coarse.aod_interval)
    return stage2_trichotomy(m, region, k, scheme=SCHEME_SZO)
