"""Command-line front end: ``fdrelay analyze|simulate|optimize``.

Configuration is a flat text file with one ``key = value`` per line and
``#`` comments. Keys are the :class:`SystemParams` fields, ``snr_db`` (sets
both transmit powers with the noise power ``kappa * W`` normalized to 1) and
the experiment keys ``q_values``, ``variants``, ``n_mc``, ``n_slots``,
``seed``, ``strict_region``, ``output_path``, ``output_format``,
``grid_check``, ``grid_step``, ``workers``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from dataclasses import dataclass, field, fields

from .channel import SystemParams
from .montecarlo import as_seed_sequence, estimate_mode_probs
from .optimize import brute_force_policy, optimize_policy
from .sim import SchemeVariant, analytic_mu, mask_for, validate_against_markov

log = logging.getLogger("fdrelay")

CSV_HEADER = ("variant", "q", "mu_analytic", "mu_empirical", "gap", "seed")

_PARAM_FIELDS = {f.name: f for f in fields(SystemParams)}
_INT_PARAMS = {"buffer_cap_q", "codeword_len_b"}


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    params: SystemParams = field(default_factory=SystemParams.from_snr_db)
    q_values: list = field(default_factory=lambda: list(range(1, 51)))
    variants: list = field(default_factory=lambda: list(SchemeVariant))
    n_mc: int = 100_000
    n_slots: int = 1_000_000
    seed: int = 0
    strict_region: bool = False
    output_path: str | None = None
    output_format: str = "csv"
    grid_check: bool = False
    grid_step: float = 0.01
    workers: int = 1

    def __post_init__(self):
        if not self.q_values:
            raise ConfigError("q_values must not be empty")
        if any(q < 1 for q in self.q_values):
            raise ConfigError("every buffer size must be >= 1")
        if self.n_mc < 1 or self.n_slots < 1:
            raise ConfigError("n_mc and n_slots must be >= 1")
        if self.output_format not in ("csv", "json"):
            raise ConfigError(f"unknown output format {self.output_format!r}")
        self.variants = [SchemeVariant(v) for v in self.variants]


def parse_q_values(text: str) -> list:
    """``"1-5,10"`` -> ``[1, 2, 3, 4, 5, 10]``."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return out


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def parse_config_text(text: str) -> dict:
    entries = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key in entries:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        entries[key] = value
    return entries


def config_from_entries(entries: dict) -> ExperimentConfig:
    entries = dict(entries)
    param_kw = {}
    snr_db = entries.pop("snr_db", None)
    for key in list(entries):
        if key in _PARAM_FIELDS:
            value = entries.pop(key)
            param_kw[key] = int(value) if key in _INT_PARAMS else float(value)
    try:
        if snr_db is not None:
            params = SystemParams.from_snr_db(float(snr_db), **param_kw)
        elif param_kw:
            params = SystemParams(**param_kw)
        else:
            params = SystemParams.from_snr_db()
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    kw = {"params": params}
    converters = {
        "q_values": parse_q_values,
        "variants": lambda s: [SchemeVariant(v.strip().lower()) for v in s.split(",")
                               if v.strip()],
        "n_mc": int, "n_slots": int, "seed": int, "workers": int,
        "strict_region": _parse_bool, "grid_check": _parse_bool,
        "grid_step": float, "output_path": str, "output_format": str,
    }
    for key, value in entries.items():
        if key not in converters:
            raise ConfigError(f"unknown config key {key!r}")
        try:
            kw[key] = converters[key](value)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key}: {exc}") from exc
    return ExperimentConfig(**kw)


def load_config(path: str | None) -> ExperimentConfig:
    if path is None:
        return ExperimentConfig()
    with open(path, encoding="utf-8") as fh:
        return config_from_entries(parse_config_text(fh.read()))


def _estimate(config: ExperimentConfig, variant: SchemeVariant, mc_seed):
    return estimate_mode_probs(config.params, config.n_mc, mc_seed,
                               strict_region=config.strict_region,
                               mask=mask_for(variant), workers=config.workers)


def _mc_seed(seed):
    # Same derivation as sim.validate_against_markov, so both see one estimate.
    return as_seed_sequence(seed).spawn(2)[0]


def cmd_analyze(config: ExperimentConfig) -> list:
    rows = []
    estimates = {v: _estimate(config, v, _mc_seed(config.seed)) for v in config.variants}
    for q in config.q_values:
        for variant in config.variants:
            est = estimates[variant]
            try:
                if variant is SchemeVariant.BUFFERLESS_FD:
                    mu, alphas, method = est.probs.p_df_total, [], "bufferless"
                else:
                    sol = optimize_policy(est.probs, q)
                    mu, alphas, method = sol.mu, list(sol.policy.alphas), sol.method
            except Exception as exc:
                raise RuntimeError(f"analyze failed at q={q}, variant={variant.value}: "
                                   f"{exc}") from exc
            rows.append({"variant": variant.value, "q": q, "mu_analytic": mu,
                         "mu_empirical": None, "gap": None, "seed": config.seed,
                         "alphas": alphas, "method": method,
                         "probs": est.probs.to_dict()})
    return rows


def cmd_simulate(config: ExperimentConfig) -> list:
    rows = []
    estimates = {v: _estimate(config, v, _mc_seed(config.seed)) for v in config.variants}
    for q in config.q_values:
        for variant in config.variants:
            try:
                sol = optimize_policy(estimates[variant].probs, q)
                res = validate_against_markov(
                    config.params.with_(buffer_cap_q=q), sol.policy, config.n_slots,
                    config.seed, variant=variant, n_mc=config.n_mc,
                    strict_region=config.strict_region)
            except Exception as exc:
                raise RuntimeError(f"simulate failed at q={q}, variant={variant.value}: "
                                   f"{exc}") from exc
            rows.append({"variant": variant.value, "q": q,
                         "mu_analytic": res.analytic_mu,
                         "mu_empirical": res.empirical_mu, "gap": res.abs_gap,
                         "seed": config.seed, "alphas": list(sol.policy.alphas),
                         "queue_hist": [float(v) for v in res.report.queue_hist],
                         "mode_counts": res.report.to_dict()["mode_counts"]})
            log.info("q=%d %s empirical=%.5f analytic=%.5f", q, variant.value,
                     res.empirical_mu, res.analytic_mu)
    return rows


def cmd_optimize(config: ExperimentConfig) -> dict:
    q = config.q_values[0]
    variant = config.variants[0]
    if variant is SchemeVariant.BUFFERLESS_FD:
        raise ConfigError("the bufferless scheme has no policy to optimize")
    est = _estimate(config, variant, _mc_seed(config.seed))
    sol = optimize_policy(est.probs, q)
    out = {"variant": variant.value, "q": q, "seed": config.seed, **sol.to_dict(),
           "probs": est.probs.to_dict(), "stderr": est.stderr}
    if config.grid_check:
        grid = brute_force_policy(est.probs, q, config.grid_step)
        out["mu_grid"] = grid.mu
        out["grid_alphas"] = list(grid.policy.alphas)
        out["abs_diff_grid"] = abs(sol.mu - grid.mu)
    return out


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render_rows(rows: list, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(rows, indent=2, sort_keys=False) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow([_fmt(row[key]) for key in CSV_HEADER])
    return buf.getvalue()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fdrelay",
        description="Hybrid HD/FD buffer-aided secure relaying: analysis and simulation.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value configuration file")
    common.add_argument("--seed", type=int, help="master seed (overrides config)")
    common.add_argument("--format", choices=("csv", "json"), help="output format")
    common.add_argument("--strict-region", action="store_true", default=None,
                        help="also require the RF-FD sum-rate bound for S*")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--q", help="buffer sizes, e.g. '1-10' or '2,5,10'")
    common.add_argument("--variants", help="comma-separated scheme variants")
    common.add_argument("--n-mc", type=int, help="Monte Carlo samples for probabilities")
    common.add_argument("--n-slots", type=int, help="simulated slots per point")
    common.add_argument("--workers", type=int, help="threads for probability estimation")
    common.add_argument("-v", "--verbose", action="store_true")

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("analyze", parents=[common], help="analytic throughput sweep")
    sub.add_parser("simulate", parents=[common], help="simulation vs analysis sweep")
    opt = sub.add_parser("optimize", parents=[common], help="optimal policy for one Q")
    opt.add_argument("--grid-check", action="store_true", default=None,
                     help="cross-check against an exhaustive grid")
    opt.add_argument("--grid-step", type=float)
    return parser


def _apply_overrides(config: ExperimentConfig, args) -> ExperimentConfig:
    overrides = {
        "seed": args.seed,
        "output_format": args.format,
        "strict_region": args.strict_region,
        "output_path": args.out,
        "n_mc": args.n_mc,
        "n_slots": args.n_slots,
        "workers": args.workers,
        "grid_check": getattr(args, "grid_check", None),
        "grid_step": getattr(args, "grid_step", None),
    }
    if args.q is not None:
        overrides["q_values"] = parse_q_values(args.q)
    if args.variants is not None:
        overrides["variants"] = [SchemeVariant(v.strip().lower())
                                 for v in args.variants.split(",") if v.strip()]
    kw = {f.name: getattr(config, f.name) for f in fields(config)}
    kw.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig(**kw)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        config = _apply_overrides(load_config(args.config), args)
        if args.command == "analyze":
            text = render_rows(cmd_analyze(config), config.output_format)
        elif args.command == "simulate":
            text = render_rows(cmd_simulate(config), config.output_format)
        else:
            text = json.dumps(cmd_optimize(config), indent=2) + "\n"
        if config.output_path:
            with open(config.output_path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"fdrelay: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
