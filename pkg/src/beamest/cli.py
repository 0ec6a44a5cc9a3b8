"""Command-line front end.

Subcommands: design (emit combiner/precoder JSON), estimate (single run),
experiment (full sweep to CSV/JSON), codebook (emit codebook and beam
patterns).  Flags override config-file values.  Exit codes: 0 success,
2 config validation failure, 1 runtime error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict

import numpy as np

from .channel import generate_channel, los_truth
from .codebook import beam_pattern, build_codebook, codebook_to_dict
from .config import SystemConfig, load_config, require_valid
from .errors import ConfigValidationError
from .harness import _build_designs, _estimate_one, emit_results, run_experiment, training_slots
from .ia_design import combiner_to_dict, precoder_to_dict


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="beamest", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, need_seed=False):
        sp.add_argument("--config", type=str, default=None, help="JSON config file")
        sp.add_argument("--seed", type=int, default=None, required=need_seed)
        sp.add_argument("--out", type=str, default=None, help="output path (default: stdout)")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.add_argument("--scheme", choices=("ia", "szo", "czo", "random"), default=None)
        sp.add_argument("--snr", type=str, default=None, help="comma-separated SNR list in dB")
        sp.add_argument("--trials", type=int, default=None)

    common(sub.add_parser("design", help="emit designed combiner/precoder as JSON"))
    common(sub.add_parser("estimate", help="single estimation run, prints the estimate as JSON"))
    common(sub.add_parser("experiment", help="full sweep to CSV/JSON"), need_seed=True)
    common(sub.add_parser("codebook", help="emit hierarchical codebooks and beam patterns"))
    return p


def _load(args) -> SystemConfig:
    cfg = load_config(args.config) if args.config else SystemConfig()
    if args.seed is not None:
        cfg.seed = args.seed
    if args.scheme is not None:
        cfg.schemes = [args.scheme]
    if args.snr is not None:
        cfg.snr_db_list = [float(x) for x in args.snr.split(",") if x]
    if args.trials is not None:
        cfg.trials = args.trials
    return cfg


def _write(text: str, out) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(out, "w") as f:
            f.write(text)


def _cmd_design(args) -> int:
    cfg = _load(args)
    require_valid(cfg)
    payload = {}
    for scheme in cfg.schemes:
        designs = _build_designs(cfg, scheme, cfg.t_1, cfg.t_2, cfg.seed)
        if scheme in ("ia", "random"):
            payload[scheme] = {
                "combiner": combiner_to_dict(designs["w"]),
                "precoder": precoder_to_dict(designs["f"]),
            }
        else:
            payload[scheme] = {
                "w_gram_diag": list(np.diag(designs["w_gram"].matrix).real),
                "f_gram_diag": list(np.diag(designs["f_gram"].matrix).real),
            }
    _write(json.dumps(payload), args.out)
    return 0


def _cmd_estimate(args) -> int:
    cfg = _load(args)
    require_valid(cfg)
    scheme = cfg.schemes[0]
    snr_db = cfg.snr_db_list[0]
    noise_var = cfg.p_f / 10.0 ** (snr_db / 10.0)
    from .config import SZO_T1, SZO_T2
    t_1 = SZO_T1 if scheme == "szo" else cfg.t_1
    t_2 = SZO_T2 if scheme == "szo" else cfg.t_2
    designs = _build_designs(cfg, scheme, t_1, t_2, cfg.seed)
    ch = generate_channel(cfg.n_a, cfg.m_a, cfg.l_paths, cfg.seed + 1, cfg.nlos_var)
    est = _estimate_one(cfg, scheme, designs, ch, noise_var, cfg.seed + 2)
    aoa, aod = los_truth(ch)
    payload = asdict(est)
    payload["truth_aoa"] = aoa
    payload["truth_aod"] = aod
    payload["error"] = math.hypot(est.aoa_hat - aoa, est.aod_hat - aod)
    payload["training_slots"] = training_slots(cfg, scheme)
    _write(json.dumps(payload), args.out)
    return 0


def _cmd_experiment(args) -> int:
    cfg = _load(args)
    result = run_experiment(cfg)
    out = args.out or "results." + args.format
    emit_results(result, out, args.format)
    sys.stdout.write(f"wrote {len(result.rows)} rows to {out}\n")
    return 0


def _cmd_codebook(args) -> int:
    cfg = _load(args)
    angles = np.linspace(-1.0, 1.0, 513)
    payload = {}
    for side, n in (("bs", cfg.n_a), ("ue", cfg.m_a)):
        cb = build_codebook(n)
        patterns = {
            f"layer{s}": [list(map(float, beam_pattern(cb.codeword(s, c), angles))) for c in range(2**s)]
            for s in (1, 2)
        }
        payload[side] = {"codebook": codebook_to_dict(cb), "patterns": patterns}
    payload["pattern_angles"] = list(map(float, angles))
    _write(json.dumps(payload), args.out)
    return 0


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    handlers = {
        "design": _cmd_design,
        "estimate": _cmd_estimate,
        "experiment": _cmd_experiment,
        "codebook": _cmd_codebook,
    }
    try:
        return handlers[args.command](args)
    except ConfigValidationError as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
