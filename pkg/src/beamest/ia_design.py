"""Hybrid combiner/precoder design by identity-matrix approximation.

The stacked combiner W (t_3 x n_a, t_3 = t_2 * n_r) and the effective
precoder F (m_a x t_1) are designed so that W^H W and F F^H approximate
scaled identities.  Each time slot carries a digital factor (unconstrained)
and an analog factor whose entries live on a constant-modulus,
phase-quantized grid.  Per slot the design alternates a closed-form
orthogonal-Procrustes update of the digital factor with a nearest-grid
projection of the analog factor until the iterates stabilize, then rescales
the digital factor to meet the slot power budget.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidDimensionError


@dataclass(frozen=True)
class PhaseShifterGrid:
    """Feasible set for analog entries: fixed modulus, 2**bits phase levels.

    Levels are normalized phases (phase / pi) at -1 + 2m/2**bits.
    """

    bits: int
    magnitude: float

    @property
    def n_levels(self) -> int:
        return 2**self.bits

    @property
    def levels(self) -> np.ndarray:
        return -1.0 + 2.0 * np.arange(self.n_levels) / self.n_levels


@dataclass
class DesignSlot:
    digital: np.ndarray
    analog: np.ndarray


@dataclass
class HybridCombiner:
    slots: list[DesignSlot]
    stacked: np.ndarray  # (t_2 * n_r, n_a)
    converged: bool
    eps_history: list[list[float]] = field(default_factory=list)


@dataclass
class HybridPrecoder:
    slots: list[DesignSlot]
    effective: np.ndarray  # (m_a, t_1), column = analog @ digital @ ones
    converged: bool
    eps_history: list[list[float]] = field(default_factory=list)


def gamma_scale(m: np.ndarray, dim: int) -> float:
    """Identity-approximation scale ||m||_F / sqrt(dim) of a gram matrix."""
    return float(np.linalg.norm(m) / math.sqrt(dim))


def target_semi_unitary(dim: int, count: int, rng_seed, orientation: str = "rows") -> np.ndarray:
    """First `count` rows (or columns) of a random dim x dim unitary.

    The unitary is the left factor of the SVD of a uniform-[0,1] random
    matrix, with each singular vector phased so its first nonzero component
    is real positive.
    """
    if count > dim:
        raise InvalidDimensionError(f"cannot take {count} rows/cols from a {dim}x{dim} unitary")
    rng = np.random.default_rng(rng_seed)
    a = rng.random((dim, dim))
    u, _, _ = _canonical_svd(a)
    u = u.astype(complex)
    if orientation == "rows":
        return u[:count, :]
    if orientation == "cols":
        return u[:, :count]
    raise ValueError(f"orientation must be 'rows' or 'cols', got {orientation!r}")


def _canonical_svd(a: np.ndarray):
    """Thin SVD with each left singular vector's first nonzero entry real positive."""
    u, s, vh = np.linalg.svd(a, full_matrices=False)
    for j in range(u.shape[1]):
        col = u[:, j]
        nz = np.flatnonzero(np.abs(col) > 1e-14)
        if nz.size == 0:
            continue
        phase = col[nz[0]] / abs(col[nz[0]])
        u[:, j] = col / phase
        vh[j, :] = vh[j, :] * phase
    return u, s, vh


def quantize_analog(target: np.ndarray, grid: PhaseShifterGrid) -> np.ndarray:
    """Project each entry onto the grid: fixed modulus, nearest phase level.

    Zero-magnitude entries map to phase level 0.  Phase distance is circular,
    so a phase of +pi lands on the -1 level.
    """
    target = np.asarray(target)
    p = np.angle(target) / np.pi  # (-1, 1]; angle(0) = 0
    step = 2.0 / grid.n_levels
    m = np.floor((p + 1.0) / step + 0.5).astype(int) % grid.n_levels
    return grid.magnitude * np.exp(1j * np.pi * (-1.0 + m * step))


def procrustes_digital(analog: np.ndarray, target: np.ndarray, beta: float) -> np.ndarray:
    """Scaled-orthogonal factor D minimizing ||analog - D^H @ target||_F.

    D = beta**-0.5 * V @ U^H with analog @ target^H = U S V^H, so
    D^H @ D = (1/beta) * I.
    """
    u, _, vh = _canonical_svd(analog @ target.conj().T)
    return (vh.conj().T @ u.conj().T) / math.sqrt(beta)


def random_grid_matrix(shape, grid: PhaseShifterGrid, rng) -> np.ndarray:
    """Analog matrix with i.i.d. uniform phase levels (feasible by construction)."""
    m = rng.integers(0, grid.n_levels, size=shape)
    return grid.magnitude * np.exp(1j * np.pi * (-1.0 + 2.0 * m / grid.n_levels))


def _frob2(a: np.ndarray) -> float:
    return float(np.vdot(a, a).real)


def design_combiner(
    cfg,
    grid: PhaseShifterGrid,
    delta: float = 1e-3,
    max_iters: int = 100,
    rng_seed=0,
) -> HybridCombiner:
    """Design the t_2 combining slots against a random semi-unitary target.

    Stops a slot's alternation once the normalized iterate movement drops
    below delta (eps history is recorded either way).  Requires
    t_2 * n_r < n_a; with t_3 >= n_a a semi-unitary can be used directly and
    no approximation is needed.
    """
    n_a, n_r, t_2 = cfg.n_a, cfg.n_r, cfg.t_2
    t_3 = t_2 * n_r
    if t_3 >= n_a:
        raise InvalidDimensionError(
            f"t_2*n_r = {t_3} must be below n_a = {n_a}; use an exact semi-unitary instead"
        )
    rng = np.random.default_rng(rng_seed)
    target = target_semi_unitary(n_a, t_3, rng, orientation="rows")
    beta = cfg.p_w / (n_a * n_r)

    slots: list[DesignSlot] = []
    histories: list[list[float]] = []
    converged_all = True
    for b in range(t_2):
        tgt = target[b * n_r : (b + 1) * n_r, :]
        analog = random_grid_matrix((n_r, n_a), grid, rng)
        digital = np.zeros((n_r, n_r), dtype=complex)
        history: list[float] = []
        converged = False
        for _ in range(max_iters):
            d_ortho = procrustes_digital(analog, tgt, beta)
            new_digital = beta * d_ortho
            new_analog = quantize_analog(d_ortho.conj().T @ tgt, grid)
            eps = (_frob2(new_analog - analog) + _frob2(new_digital - digital)) / (
                _frob2(analog) + _frob2(digital)
            )
            history.append(eps)
            analog, digital = new_analog, new_digital
            if eps < delta:
                converged = True
                break
        digital = math.sqrt(cfg.p_w) * digital / np.linalg.norm(digital @ analog)
        slots.append(DesignSlot(digital=digital, analog=analog))
        histories.append(history)
        converged_all = converged_all and converged

    stacked = np.vstack([s.digital @ s.analog for s in slots])
    return HybridCombiner(slots=slots, stacked=stacked, converged=converged_all, eps_history=histories)


def design_precoder(
    cfg,
    grid: PhaseShifterGrid,
    delta: float = 1e-3,
    max_iters: int = 100,
    rng_seed=0,
) -> HybridPrecoder:
    """Design the t_1 precoding slots; mirrors design_combiner column-wise.

    Slot t_1 approximates column t_1 of a random semi-unitary by
    analog @ f_b where analog is grid-constrained (m_a x m_r) and f_b is the
    digital vector; the digital update is the matched closed form of the
    Procrustes step in the transposed orientation.  After convergence the
    digital matrix is f_b @ ones^T / m_r, rescaled to the slot power budget.
    """
    m_a, m_r, t_1 = cfg.m_a, cfg.m_r, cfg.t_1
    if t_1 >= m_a:
        raise InvalidDimensionError(
            f"t_1 = {t_1} must be below m_a = {m_a}; use an exact semi-unitary instead"
        )
    rng = np.random.default_rng(rng_seed)
    target = target_semi_unitary(m_a, t_1, rng, orientation="cols")
    beta = cfg.p_f / (m_a * m_r)

    slots: list[DesignSlot] = []
    histories: list[list[float]] = []
    columns: list[np.ndarray] = []
    converged_all = True
    ones = np.ones(m_r)
    for t in range(t_1):
        tgt = target[:, t]
        analog = random_grid_matrix((m_a, m_r), grid, rng)
        f_b = np.zeros(m_r, dtype=complex)
        history: list[float] = []
        converged = False
        for _ in range(max_iters):
            s = analog.conj().T @ tgt
            ns = np.linalg.norm(s)
            if ns > 0:
                f_d = s / (ns * math.sqrt(beta))
            else:
                f_d = np.zeros(m_r, dtype=complex)
                f_d[0] = 1.0 / math.sqrt(beta)
            new_f_b = beta * f_d
            new_analog = quantize_analog(np.outer(tgt, f_d.conj()), grid)
            eps = (_frob2(new_analog - analog) + _frob2(new_f_b - f_b)) / (
                _frob2(analog) + _frob2(f_b)
            )
            history.append(eps)
            analog, f_b = new_analog, new_f_b
            if eps < delta:
                converged = True
                break
        digital = np.outer(f_b, ones) / m_r
        digital = math.sqrt(cfg.p_f) * digital / np.linalg.norm(analog @ digital)
        slots.append(DesignSlot(digital=digital, analog=analog))
        histories.append(history)
        columns.append(analog @ digital @ ones)
        converged_all = converged_all and converged

    effective = np.column_stack(columns)
    return HybridPrecoder(slots=slots, effective=effective, converged=converged_all, eps_history=histories)


def random_combiner(cfg, grid: PhaseShifterGrid, rng_seed=0) -> HybridCombiner:
    """Baseline combiner: uniform grid phases, random orthonormal digital factor."""
    rng = np.random.default_rng(rng_seed)
    slots = []
    for _ in range(cfg.t_2):
        analog = random_grid_matrix((cfg.n_r, cfg.n_a), grid, rng)
        digital = _random_unitary(cfg.n_r, rng)
        digital = math.sqrt(cfg.p_w) * digital / np.linalg.norm(digital @ analog)
        slots.append(DesignSlot(digital=digital, analog=analog))
    stacked = np.vstack([s.digital @ s.analog for s in slots])
    return HybridCombiner(slots=slots, stacked=stacked, converged=True)


def random_precoder(cfg, grid: PhaseShifterGrid, rng_seed=0) -> HybridPrecoder:
    """Baseline precoder: uniform grid phases, random unit digital direction."""
    rng = np.random.default_rng(rng_seed)
    slots = []
    columns = []
    ones = np.ones(cfg.m_r)
    for _ in range(cfg.t_1):
        analog = random_grid_matrix((cfg.m_a, cfg.m_r), grid, rng)
        f_b = _random_unitary(cfg.m_r, rng)[:, 0]
        digital = np.outer(f_b, ones) / cfg.m_r
        digital = math.sqrt(cfg.p_f) * digital / np.linalg.norm(analog @ digital)
        slots.append(DesignSlot(digital=digital, analog=analog))
        columns.append(analog @ digital @ ones)
    effective = np.column_stack(columns)
    return HybridPrecoder(slots=slots, effective=effective, converged=True)


def _random_unitary(n: int, rng) -> np.ndarray:
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def _matrix_to_list(a: np.ndarray) -> list:
    return [[[float(v.real), float(v.imag)] for v in row] for row in np.atleast_2d(a)]


def _matrix_from_list(rows) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in rows])


def combiner_to_dict(w: HybridCombiner) -> dict:
    return {
        "kind": "combiner",
        "slots": [
            {"digital": _matrix_to_list(s.digital), "analog": _matrix_to_list(s.analog)}
            for s in w.slots
        ],
        "stacked": _matrix_to_list(w.stacked),
        "converged": w.converged,
    }


def precoder_to_dict(f: HybridPrecoder) -> dict:
    return {
        "kind": "precoder",
        "slots": [
            {"digital": _matrix_to_list(s.digital), "analog": _matrix_to_list(s.analog)}
            for s in f.slots
        ],
        "effective": _matrix_to_list(f.effective),
        "converged": f.converged,
    }


def combiner_from_dict(d: dict) -> HybridCombiner:
    slots = [
        DesignSlot(digital=_matrix_from_list(s["digital"]), analog=_matrix_from_list(s["analog"]))
        for s in d["slots"]
    ]
    return HybridCombiner(slots=slots, stacked=_matrix_from_list(d["stacked"]), converged=d["converged"])


def precoder_from_dict(d: dict) -> HybridPrecoder:
    slots = [
        DesignSlot(digital=_matrix_from_list(s["digital"]), analog=_matrix_from_list(s["analog"]))
        for s in d["slots"]
    ]
    return HybridPrecoder(slots=slots, effective=_matrix_from_list(d["effective"]), converged=d["converged"])


def dump_design(obj, path) -> None:
    to_dict = combiner_to_dict if isinstance(obj, HybridCombiner) else precoder_to_dict
    with open(path, "w") as f:
        json.dump(to_dict(obj), f)
