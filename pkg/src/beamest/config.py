"""Simulation configuration and validation."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields

from .errors import ConfigValidationError

KNOWN_SCHEMES = ("ia", "szo", "czo", "random")

# The scattered scheme always trains with t_1 = 2 precoders and t_2 = 1
# combiner; its slot budget is fixed, not swept.
SZO_T1 = 2
SZO_T2 = 1


@dataclass
class SystemConfig:
    n_a: int = 64
    m_a: int = 16
    n_r: int = 4
    m_r: int = 1
    u: int = 4
    k: int = 1024
    t_1: int = 4
    t_2: int = 4
    bs_bits: int = 6
    ue_bits: int = 4
    l_paths: int = 3
    nlos_var: float = 0.01
    snr_db_list: list[float] = field(default_factory=lambda: [0.0, 5.0, 10.0, 15.0, 20.0])
    trials: int = 300
    delta: float = 1e-3
    seed: int = 0
    schemes: list[str] = field(default_factory=lambda: ["ia", "szo", "czo", "random"])
    p_w: float = 1.0
    p_f: float = 1.0
    max_iters: int = 100
    sweep_var: str = "snr"          # "snr" or "slots"
    slots_list: list[int] = field(default_factory=list)
    fixed_snr_db: float = 15.0


def _is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def validate(cfg: SystemConfig) -> list[str]:
    """Return a list of violated constraints (empty when the config is usable)."""
    v: list[str] = []
    for name in ("n_a", "m_a", "n_r", "m_r", "u", "k", "t_1", "t_2", "bs_bits", "ue_bits", "l_paths", "trials"):
        if getattr(cfg, name) < 1:
            v.append(f"{name} must be a positive integer")
    if cfg.k < cfg.n_a or cfg.k < cfg.m_a:
        v.append(f"k = {cfg.k} must be at least n_a = {cfg.n_a} and m_a = {cfg.m_a}")
    if cfg.nlos_var < 0:
        v.append("nlos_var must be non-negative")
    if cfg.delta <= 0:
        v.append("delta must be positive")
    if cfg.p_w <= 0 or cfg.p_f <= 0:
        v.append("p_w and p_f must be positive")
    unknown = [s for s in cfg.schemes if s not in KNOWN_SCHEMES]
    if unknown:
        v.append(f"unknown schemes {unknown}; valid: {list(KNOWN_SCHEMES)}")
    if not cfg.schemes:
        v.append("schemes must be non-empty")
    needs_hybrid = any(s in cfg.schemes for s in ("ia", "random"))
    if needs_hybrid:
        if cfg.t_2 * cfg.n_r >= cfg.n_a:
            v.append(f"hybrid design needs t_2*n_r ({cfg.t_2 * cfg.n_r}) < n_a ({cfg.n_a})")
        if cfg.t_1 >= cfg.m_a:
            v.append(f"hybrid design needs t_1 ({cfg.t_1}) < m_a ({cfg.m_a})")
    if "czo" in cfg.schemes:
        if cfg.t_2 * cfg.n_r > cfg.n_a:
            v.append(f"concentrated gram needs t_2*n_r ({cfg.t_2 * cfg.n_r}) <= n_a ({cfg.n_a})")
        if cfg.t_1 > cfg.m_a:
            v.append(f"concentrated gram needs t_1 ({cfg.t_1}) <= m_a ({cfg.m_a})")
    if "szo" in cfg.schemes:
        if cfg.m_a % SZO_T1 != 0:
            v.append(f"scattered gram needs t_1 = {SZO_T1} to divide m_a ({cfg.m_a})")
        if cfg.n_a % (SZO_T2 * cfg.n_r) != 0:
            v.append(f"scattered gram needs t_3 = {SZO_T2 * cfg.n_r} to divide n_a ({cfg.n_a})")
        if not _is_pow2(cfg.n_a) or not _is_pow2(cfg.m_a):
            v.append("codebook training needs power-of-two n_a and m_a")
        if cfg.n_a < cfg.m_a:
            v.append("codebook training expects n_a >= m_a")
    if cfg.sweep_var not in ("snr", "slots"):
        v.append(f"sweep_var must be 'snr' or 'slots', got {cfg.sweep_var!r}")
    if cfg.sweep_var == "snr" and not cfg.snr_db_list:
        v.append("snr_db_list must be non-empty for an snr sweep")
    if cfg.sweep_var == "slots" and not cfg.slots_list:
        v.append("slots_list must be non-empty for a slots sweep")
    return v


def require_valid(cfg: SystemConfig) -> None:
    problems = validate(cfg)
    if problems:
        raise ConfigValidationError(problems)


def config_from_dict(d: dict) -> SystemConfig:
    names = {f.name for f in fields(SystemConfig)}
    unknown = set(d) - names
    if unknown:
        raise ConfigValidationError([f"unknown config fields {sorted(unknown)}"])
    return SystemConfig(**d)


def load_config(path) -> SystemConfig:
    with open(path) as f:
        return config_from_dict(json.load(f))
