"""Command-line front end.

Each run reads one JSON config and writes one report (CSV by default, with
header ``n,trial,quantity,value``; or JSON with ``--format json``).

Exit codes: 0 ok, 2 config error, 3 precondition violation, 4 quadrature
non-convergence under ``--strict``.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .blaschke import DEFAULT_THRESHOLD, ZeroSequence, separation_report, zeros_from_json_obj
from .errors import DomainError, ExperimentAssertionError, PreconditionError
from .experiments import EXPERIMENTS, ExperimentConfig, ExperimentReport
from .modelspace import (
    gram_h2_norm,
    interpolate_in_KB,
    residue_identity_check,
    tilde_trace_via_cauchy,
)
from .quadrature import DEFAULT_CAP, DEFAULT_RTOL, default_grid, hardy_norm
from .sequences import loads_values, weighted_lp_norm
from .tilde import inverse_tilde_apply, tilde_apply, tilde_matrices

log = logging.getLogger("modelspace_lab")

EXIT_OK, EXIT_CONFIG, EXIT_PRECONDITION, EXIT_NONCONVERGED = 0, 2, 3, 4

SUBCOMMANDS = ("diagnose", "tilde", "interpolate", "counterexample",
               "scan-conjecture", "scan-necessity", "scan-operator")

# keys consumed by the CLI itself rather than by ExperimentConfig
RESERVED_KEYS = {"zeros", "zeros_file", "values", "values_file", "threshold"}


class ConfigError(Exception):
    pass


def _parse_override(item: str):
    if "=" not in item:
        raise ConfigError(f"override {item!r} is not KEY=VALUE")
    key, raw = item.split("=", 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key.strip(), value


def load_config(args) -> dict:
    path = Path(args.config)
    try:
        cfg = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    for item in args.set or []:
        key, value = _parse_override(item)
        cfg[key] = value
    if args.seed is not None:
        cfg["seed"] = args.seed
    if args.nodes is not None:
        cfg["grid_cap"] = args.nodes
    if args.tol is not None:
        cfg["rtol"] = args.tol
    cfg["_base"] = str(path.parent)
    return cfg


def _read_ref(cfg, key, file_key):
    if key in cfg:
        return cfg[key]
    if file_key in cfg:
        ref = Path(cfg[file_key])
        if not ref.is_absolute():
            ref = Path(cfg["_base"]) / ref
        try:
            return json.loads(ref.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read {file_key} {ref}: {exc}") from exc
    raise ConfigError(f"config needs {key!r} or {file_key!r}")


def config_zeros(cfg) -> ZeroSequence:
    try:
        return zeros_from_json_obj(_read_ref(cfg, "zeros", "zeros_file"))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, (PreconditionError, DomainError)):
            raise
        raise ConfigError(f"malformed zeros: {exc}") from exc


def config_values(cfg, zeros) -> np.ndarray:
    try:
        w = loads_values(_read_ref(cfg, "values", "values_file"))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"malformed values: {exc}") from exc
    if len(w) != len(zeros):
        raise PreconditionError(f"{len(w)} values for {len(zeros)} zeros")
    return w


def experiment_config(cfg) -> ExperimentConfig:
    d = {k: v for k, v in cfg.items() if k not in RESERVED_KEYS and not k.startswith("_")}
    fam = d.get("family")
    if isinstance(fam, dict):
        fam = dict(fam)
        d["family"] = fam.pop("kind", None)
        d.update(fam)
    for key in ("n_values", "gaps", "gammas"):
        if isinstance(d.get(key), list):
            d[key] = tuple(d[key])
    try:
        return ExperimentConfig.from_dict(d)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad experiment config: {exc}") from exc


def _require_interpolating(zeros, cfg):
    threshold = float(cfg.get("threshold", DEFAULT_THRESHOLD))
    rep = separation_report(zeros, threshold)
    if not rep.is_interpolating:
        raise PreconditionError(
            f"zeros not interpolating at threshold {threshold}: delta={rep.delta_derivative!r}")
    return rep


def _meta(cfg, name):
    echo = {k: v for k, v in cfg.items() if not k.startswith("_")}
    return {"command": name, "version": __version__, "config": echo}


def cmd_diagnose(cfg) -> ExperimentReport:
    zeros = config_zeros(cfg)
    rep = separation_report(zeros, float(cfg.get("threshold", DEFAULT_THRESHOLD)))
    out = ExperimentReport("diagnose", metadata=_meta(cfg, "diagnose"))
    n = len(zeros)
    for key, value in rep.as_dict().items():
        out.add(n, key, value)
    if rep.conditioning_warning:
        out.flags.append(f"conditioning warning: delta={rep.delta_product!r}")
    return out


def cmd_tilde(cfg) -> ExperimentReport:
    zeros = config_zeros(cfg)
    w = config_values(cfg, zeros)
    rep = _require_interpolating(zeros, cfg)
    wt = tilde_apply(w, zeros)
    back = inverse_tilde_apply(wt, zeros)
    scale = max(float(np.max(np.abs(w))), np.finfo(float).tiny)
    out = ExperimentReport("tilde", metadata=_meta(cfg, "tilde"))
    n = len(zeros)
    for k, v in enumerate(wt):
        out.add(n, f"wtilde_re[{k}]", v.real)
        out.add(n, f"wtilde_im[{k}]", v.imag)
    out.add(n, "roundtrip_defect", float(np.max(np.abs(back - w))) / scale)
    out.add(n, "matrix_roundtrip_defect", tilde_matrices(zeros).roundtrip_defect())
    if rep.conditioning_warning:
        out.flags.append(f"conditioning warning: delta={rep.delta_product!r}")
    return out


def cmd_interpolate(cfg) -> ExperimentReport:
    zeros = config_zeros(cfg)
    w = config_values(cfg, zeros)
    rep = _require_interpolating(zeros, cfg)
    cap = int(cfg.get("grid_cap", DEFAULT_CAP))
    rtol = float(cfg.get("rtol", DEFAULT_RTOL))
    f = interpolate_in_KB(zeros, w)
    grid = default_grid(zeros, cap)
    n = len(zeros)
    scale = max(float(np.max(np.abs(w))), np.finfo(float).tiny)
    trace_defect = float(np.max(np.abs(f(zeros.values) - w))) / scale
    h1 = hardy_norm(f, 1, grid, cap, rtol)
    h2 = hardy_norm(f, 2, grid, cap, rtol)
    gram = gram_h2_norm(f)
    wt = tilde_apply(w, zeros)
    cauchy = tilde_trace_via_cauchy(f, grid, cap, rtol)
    residue_defect = 0.0
    res_conv = True
    for k in range(n):
        quad, residues, conv = residue_identity_check(zeros, w, k, grid, cap, rtol)
        residue_defect = max(residue_defect, abs(quad - residues) / (1 + abs(residues)))
        res_conv &= conv
    converged = h1.converged and h2.converged and cauchy.converged and res_conv
    out = ExperimentReport("interpolate", metadata=_meta(cfg, "interpolate"))
    out.add(n, "trace_defect", trace_defect)
    out.add(n, "h1_norm", h1.value)
    out.add(n, "h2_norm", h2.value)
    out.add(n, "h2_norm_gram", gram)
    out.add(n, "weighted_l1", weighted_lp_norm(w, zeros, 1))
    out.add(n, "weighted_l1_tilde", weighted_lp_norm(wt, zeros, 1))
    out.add(n, "cauchy_defect", float(np.max(np.abs(cauchy.value - np.conj(wt)))))
    out.add(n, "residue_defect", residue_defect)
    out.add(n, "converged", converged)
    if not converged:
        out.converged = False
        out.flags.append("quadrature not converged")
    if rep.conditioning_warning:
        out.flags.append(f"conditioning warning: delta={rep.delta_product!r}")
    return out


def run_experiment(name, cfg) -> ExperimentReport:
    return EXPERIMENTS[name](experiment_config(cfg))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="modelspace-lab",
        description="Traces of model spaces of interpolating Blaschke products.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON config file")
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--nodes", type=int, help="quadrature node cap")
        p.add_argument("--tol", type=float, help="quadrature relative tolerance")
        p.add_argument("--strict", action="store_true",
                       help="exit 4 when any quadrature fails to converge")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="override a config key (value parsed as JSON)")
    return parser


HANDLERS = {
    "diagnose": cmd_diagnose,
    "tilde": cmd_tilde,
    "interpolate": cmd_interpolate,
}


def run_command(args) -> int:
    try:
        cfg = load_config(args)
        handler = HANDLERS.get(args.subcommand)
        report = handler(cfg) if handler else run_experiment(args.subcommand, cfg)
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    except (PreconditionError, DomainError, ExperimentAssertionError) as exc:
        log.error("precondition violated: %s", exc)
        return EXIT_PRECONDITION
    text = report.to_json() if args.format == "json" else report.to_csv()
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    for flag in report.flags:
        log.warning("%s", flag)
    if args.strict and not report.converged:
        return EXIT_NONCONVERGED
    return EXIT_OK


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    return run_command(args)


if __name__ == "__main__":
    sys.exit(main())
