"""Batch command-line interface.

Subcommands: sample, density, hellinger, bounds-sweep, isometry-sweep,
estimate, risk-curve. Every run is driven by a JSON config plus the global
flags --seed/--config/--out/--threads, and is byte-identical when repeated
with the same inputs. Exit codes: 0 all assertions passed, 1 property
violation, 2 usage or configuration error.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys

import numpy as np

from .core import (
    DppDensity,
    Spectrum,
    density_table,
    params_from_dict,
    params_to_dict,
    write_table_csv,
)
from .estimator import CandidateCaps, SubspaceModel, build_candidates, select
from .experiments import (
    SWEEP_HEADER,
    BoundsSweepConfig,
    IsometrySweepConfig,
    RiskCurveConfig,
    risk_rows_for_csv,
    run_bounds_sweep,
    run_isometry_sweep,
    run_risk_curve,
    write_metadata,
    write_rows_csv,
)
from .hellinger import hellinger
from .rng import SeededRng
from .sampling import SampleSet, sample_dpp
from .core import Config as Configuration


class ConfigError(Exception):
    pass


def _load_config(args) -> dict:
    if not args.config:
        raise ConfigError("this subcommand requires --config <path>")
    try:
        with open(args.config) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    return data


def _require_out(args) -> str:
    if not args.out:
        raise ConfigError("this subcommand requires --out <path>")
    return args.out


def _seed(args, cfg: dict, default=0) -> int:
    if args.seed is not None:
        return args.seed
    return int(cfg.get("seed", default))


def _cmd_sample(args) -> int:
    cfg = _load_config(args)
    fam, spec = params_from_dict(cfg["params"])
    n = int(cfg.get("n", 1))
    rng = SeededRng(_seed(args, cfg))
    samples = sample_dpp(DppDensity(fam, spec), n, rng)
    samples.write_csv(_require_out(args))
    return 0


def _cmd_density(args) -> int:
    cfg = _load_config(args)
    fam, spec = params_from_dict(cfg["params"])
    table = density_table(DppDensity(fam, spec))
    write_table_csv(table, _require_out(args))
    return 0


def _cmd_hellinger(args) -> int:
    cfg = _load_config(args)
    fam_a, spec_a = params_from_dict(cfg["params_a"])
    fam_b, spec_b = params_from_dict(cfg["params_b"])
    h2, affinity = hellinger(
        density_table(DppDensity(fam_a, spec_a)),
        density_table(DppDensity(fam_b, spec_b)),
    )
    write_rows_csv(_require_out(args), ["h2", "affinity"], [(h2, affinity)])
    return 0


def _cmd_bounds_sweep(args) -> int:
    cfg = _load_config(args) if args.config else {}
    sweep = BoundsSweepConfig(
        instances=int(cfg.get("instances", 1000)),
        p_max=int(cfg.get("p_max", 6)),
        rank_max=int(cfg.get("rank_max", 3)),
        seed=_seed(args, cfg),
    )
    rows, violations = run_bounds_sweep(sweep)
    out = _require_out(args)
    write_rows_csv(out, SWEEP_HEADER, rows)
    write_metadata(out + ".meta.json", vars(sweep), {"violations": violations})
    return 0 if violations == 0 else 1


def _cmd_isometry_sweep(args) -> int:
    cfg = _load_config(args) if args.config else {}
    sweep = IsometrySweepConfig(
        instances=int(cfg.get("instances", 1000)),
        p_max=int(cfg.get("p_max", 6)),
        k_max=int(cfg.get("k_max", 3)),
        seed=_seed(args, cfg),
    )
    rows, violations = run_isometry_sweep(sweep)
    out = _require_out(args)
    write_rows_csv(out, SWEEP_HEADER, rows)
    write_metadata(out + ".meta.json", vars(sweep), {"violations": violations})
    return 0 if violations == 0 else 1


def _model_from_dict(data: dict) -> SubspaceModel:
    p = int(data["p"])
    dim = int(data["dim"])
    flat = np.array([complex(re, im) for re, im in data["basis"]])
    if flat.size != p * dim:
        raise ConfigError(f"model basis has {flat.size} entries, expected {p * dim}")
    return SubspaceModel(flat.reshape(dim, p).T, id=int(data["id"]))


def _read_samples_csv(path) -> tuple:
    with open(path) as fh:
        reader = csv.DictReader(fh)
        masks = [int(row["config_bitmask"]) for row in reader]
    return tuple(Configuration.from_mask(m) for m in masks)


def _cmd_estimate(args) -> int:
    cfg = _load_config(args)
    if cfg.get("test_statistic", "signed-root") != "signed-root":
        raise ConfigError("unknown test_statistic (only 'signed-root' is available)")
    models = [_model_from_dict(m) for m in cfg["models"]]
    prior = {int(m["id"]): float(m["prior"]) for m in cfg["models"]}
    if math.fsum(prior.values()) > 1.0 + 1e-12:
        raise ConfigError("model prior weights must sum to at most 1")
    n = int(cfg["n"])
    caps_cfg = cfg["caps"]
    caps = CandidateCaps(int(caps_cfg["j_max"]), int(caps_cfg["per_net"]),
                         int(caps_cfg["family_max"]))
    seed = _seed(args, cfg)
    rng = SeededRng(seed)
    anchor = None
    if "anchor" in cfg:
        anchor, _ = params_from_dict(cfg["anchor"])
    if "samples_csv" in cfg:
        draws = _read_samples_csv(cfg["samples_csv"])
        samples = SampleSet(draws, cfg["samples_csv"], seed)
    elif "truth" in cfg:
        fam, spec = params_from_dict(cfg["truth"])
        samples = sample_dpp(DppDensity(fam, spec), n, rng.split(0))
    else:
        raise ConfigError("estimate config needs 'samples_csv' or 'truth'")
    family = build_candidates(models, prior, n, caps, rng.split(1),
                              pool_size=int(cfg.get("pool_size", 256)),
                              anchor=anchor)
    result = select(family, samples)
    chosen = family.entries[result.chosen_index]
    out = _require_out(args)
    payload = {
        "chosen": params_to_dict(chosen.family, chosen.spectrum),
        "chosen_position": result.chosen_index,
        "chosen_index": [
            chosen.index[0], list(chosen.index[1]), list(chosen.index[2]),
            chosen.index[3],
        ],
        "chosen_prior": chosen.prior,
        "crit": [float(c) for c in result.crit_values],
        "priors": [e.prior for e in family.entries],
        "prior_mass": family.prior_mass(),
        "truncated": family.truncated,
        "net_sizes": {str(k): v for k, v in family.net_sizes.items()},
        "n_samples": len(samples),
        "seed": seed,
    }
    with open(out, "w") as fh:
        json.dump(payload, fh, indent=1, sort_keys=True)
        fh.write("\n")
    write_rows_csv(
        out + ".tests.csv",
        ["row", "col", "sign"],
        [(a, b, int(result.test_matrix[a, b]))
         for a in range(len(family)) for b in range(len(family))],
    )
    return 0


def _cmd_risk_curve(args) -> int:
    cfg = _load_config(args) if args.config else {}
    curve = RiskCurveConfig(
        p=int(cfg.get("p", 8)),
        k=int(cfg.get("k", 2)),
        n_grid=tuple(cfg.get("n_grid", (100, 300, 1000, 3000))),
        replications=int(cfg.get("replications", 100)),
        caps=tuple(cfg.get("caps", (2, 4, 40))),
        pool_size=int(cfg.get("pool_size", 64)),
        anchor_jitter=int(cfg.get("anchor_jitter", 1)),
        seed=_seed(args, cfg),
        threads=args.threads if args.threads else int(cfg.get("threads", 1)),
    )
    result = run_risk_curve(curve)
    out = _require_out(args)
    header, rows = risk_rows_for_csv(result)
    write_rows_csv(out, header, rows)
    write_metadata(out + ".meta.json", vars(curve),
                   {"slope": result.slope, "medians":
                    {str(n): m for n, m in result.medians().items()}})
    normalized = [r.normalized for r in result.rows]
    ok = (max(normalized) <= 10 * min(normalized)
          and -1.5 <= result.slope <= -0.5)
    return 0 if ok else 1


COMMANDS = {
    "sample": _cmd_sample,
    "density": _cmd_density,
    "hellinger": _cmd_hellinger,
    "bounds-sweep": _cmd_bounds_sweep,
    "isometry-sweep": _cmd_isometry_sweep,
    "estimate": _cmd_estimate,
    "risk-curve": _cmd_risk_curve,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="detproc",
        description="Exact determinantal point process toolkit",
    )
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--seed", type=int, default=None,
                        help="override the config seed (u64)")
    parser.add_argument("--config", default=None, help="JSON config path")
    parser.add_argument("--out", default=None, help="output path")
    parser.add_argument("--threads", type=int, default=None,
                        help="worker threads for replication loops")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
