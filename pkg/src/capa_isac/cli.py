"""Command-line front end: CSV plot data plus a JSON provenance manifest per file."""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import json
import math
import os
import subprocess
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import FIELD_NAMES, ConfigError, SystemConfig, config_from_dict, load_config

ENV_CONFIG = "CAPA_ISAC_CONFIG"
EXIT_OK, EXIT_CHECK, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------- plumbing

def _git_describe() -> str:
    try:
        out = subprocess.run(["git", "describe", "--always", "--dirty", "--tags"],
                             cwd=Path(__file__).resolve().parent, capture_output=True,
                             text=True, timeout=5)
        return out.stdout.strip() or "unknown"
    except (OSError, subprocess.SubprocessError):
        return "unknown"


def _parse_override(text: str):
    if "=" not in text:
        raise UsageError(f"--set expects key=value, got {text!r}")
    key, raw = text.split("=", 1)
    key = key.strip().replace("-", "_")
    if key not in FIELD_NAMES:
        raise ConfigError(f"unknown config field: {key}", key)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key, value


def resolve_config(args) -> SystemConfig:
    """Defaults, then the config file (flag or environment), then command-line overrides."""
    path = args.config or os.environ.get(ENV_CONFIG)
    data = {}
    if path:
        data = load_config(path).to_dict()
    for item in args.set or []:
        key, value = _parse_override(item)
        data[key] = value
    if args.seed is not None:
        data["seed"] = args.seed
    if args.samples is not None:
        data["mc_samples"] = args.samples
    return config_from_dict(data)


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return "" if math.isnan(v) else repr(v)
    return str(v)


def write_csv(path: Path, header, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def write_manifest(path: Path, cfg: SystemConfig, args, outputs):
    manifest = {
        "subcommand": args.command,
        "argv": args.argv,
        "config": cfg.to_dict(),
        "seed": cfg.seed,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(),
        "outputs": [str(p) for p in outputs],
        "version": __version__,
        "git": _git_describe(),
    }
    mpath = path.with_suffix(".manifest.json")
    mpath.write_text(json.dumps(manifest, indent=2) + "\n")
    return mpath


def _output(args, default: str) -> Path:
    return Path(args.output or default)


# ---------------------------------------------------------------- commands

def cmd_spectrum(args, cfg):
    from .spectral import build_spectrum

    spec = build_spectrum(cfg)
    count = len(spec.eigenvalues) if args.all else min(len(spec.eigenvalues), args.modes or 4 * spec.dof)
    rows = [(n + 1, float(spec.eigenvalues[n]), float(spec.epsilon[n])) for n in range(count)]
    out = _output(args, "spectrum.csv")
    write_csv(out, ("n", "lambda_n", "epsilon_n"), rows)
    return [out]


METRIC_HEADER = ("snr_db", "design", "metric", "exact", "asymptote", "mc_mean", "mc_stderr")


def _metric_rows(cfg, model, snr_db, n_mc, workers, method):
    from .metrics import avg_sr_cc, ecr_cc, ecr_sc, op_cc, op_sc, sr_sc
    from .fading import q_spectrum
    from .montecarlo import estimate

    snr = 10.0 ** (snr_db / 10.0)
    dist = model.distribution()
    Xi = model.xi_model
    reports = {
        ("S-C", "sr"): (sr_sc(cfg, model.G_t, model.G_r, snr), "sr_sc"),
        ("S-C", "ecr"): (ecr_sc(cfg, model.G_t, Xi, snr), "ecr_sc"),
        ("S-C", "op"): (op_sc(cfg, model.G_t, Xi, snr), "op_sc"),
        ("C-C", "sr"): (avg_sr_cc(q_spectrum(model, snr), dist, cfg.frame_len, Xi, method),
                        "avg_sr_cc"),
        ("C-C", "ecr"): (ecr_cc(dist, snr), "ecr_cc"),
        ("C-C", "op"): (op_cc(dist, snr, cfg.target_rate), "op_cc"),
    }
    rows = []
    for (design, metric), (rep, kind) in reports.items():
        mc_mean = mc_se = None
        if n_mc:
            est = estimate(kind, cfg, n_mc, cfg.seed, model=model, workers=workers,
                           snr_sense=snr, snr_comm=snr)
            mc_mean, mc_se = est.mean, est.stderr
        rows.append([design, metric, rep.value, rep.asymptote, mc_mean, mc_se])
    return rows


def _sweep_values(args, default_from, default_to, default_step):
    lo = default_from if args.from_ is None else args.from_
    hi = default_to if args.to is None else args.to
    step = default_step if args.step is None else args.step
    if step <= 0 or hi < lo:
        raise UsageError("sweep needs --to >= --from and --step > 0")
    n = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [lo + i * step for i in range(n)]


def cmd_metrics(args, cfg):
    from .fading import build_channel_model

    n_mc = 0 if args.no_mc else cfg.mc_samples
    rows = []
    if args.sweep == "snr":
        model = build_channel_model(cfg)
        for db in _sweep_values(args, 0.0, 50.0, 5.0):
            rows += [[db] + r for r in _metric_rows(cfg, model, db, n_mc, args.workers, args.method)]
        header = METRIC_HEADER
    else:
        for lt in _sweep_values(args, 5.0, 20.0, 1.0):
            c = cfg.replace(tx_length=lt * cfg.wavelength)
            model = build_channel_model(c)
            db = c.snr_comm_db
            rows += [[c.tx_length] + r for r in _metric_rows(c, model, db, n_mc, args.workers,
                                                           args.method)]
        header = ("tx_length",) + METRIC_HEADER[1:]
    out = _output(args, f"metrics_{args.sweep}.csv")
    write_csv(out, header, rows)
    return [out]


def cmd_pareto(args, cfg):
    from .baselines import default_split_grid, fdsac_region, spda_region
    from .fading import build_channel_model
    from .montecarlo import draw_gains
    from .pareto import region_from_samples

    model = build_channel_model(cfg)
    taus = np.linspace(0.0, 1.0, args.taus)
    g, rho = draw_gains(model, cfg.mc_samples, cfg.seed, workers=args.workers)
    rows = [(p.tau, p.sr, p.cr, "capa-isac")
            for p in region_from_samples(cfg, model.G_t, model.G_r, g, rho, taus)]
    if not args.no_baselines:
        for p in fdsac_region(cfg, default_split_grid(args.splits), model.G_t, model.G_r,
                              gain_samples=g):
            rows.append((p.kappa, p.sr, p.cr, "fdsac"))
        spacing = cfg.wavelength if args.spacing is None else args.spacing
        for p in spda_region(cfg, spacing, taus, cfg.mc_samples, cfg.seed, args.workers):
            rows.append((p.tau, p.sr, p.cr, "spda-isac"))
    out = _output(args, "regions.csv")
    write_csv(out, ("tau", "sr", "cr", "scheme"), rows)
    return [out]


def cmd_baselines(args, cfg):
    from .baselines import fdsac_rates, spda_channel, spda_op_closed, spda_rates
    from .fading import build_channel_model
    from .metrics import sr_sc

    model = build_channel_model(cfg)
    dist = model.distribution()
    n_mc = cfg.mc_samples
    spacings = args.spacing or [cfg.wavelength / 2, cfg.wavelength]
    rows = []
    for db in _sweep_values(args, 0.0, 50.0, 5.0):
        snr = 10.0 ** (db / 10.0)
        sr_f, cr_f = fdsac_rates(cfg, args.kappa, args.iota, model.G_t, model.G_r, dist, snr, snr)
        rows.append([db, "FD", "sr", sr_f, None, None, None, "fdsac"])
        rows.append([db, "FD", "ecr", cr_f, None, None, None, "fdsac"])
        for ds in spacings:
            scheme = f"spda-{ds:g}"
            r = spda_rates(cfg, ds, n_mc, cfg.seed, args.workers, snr, snr)
            chan = spda_channel(cfg, ds)
            op_closed = spda_op_closed(chan, snr, cfg.target_rate)
            rows += [
                [db, "S-C", "sr", r.sr_sc, None, None, None, scheme],
                [db, "S-C", "ecr", None, None, r.ecr_sc.mean, r.ecr_sc.stderr, scheme],
                [db, "S-C", "op", None, None, r.op_sc.mean, r.op_sc.stderr, scheme],
                [db, "C-C", "sr", None, None, r.avg_sr_cc.mean, r.avg_sr_cc.stderr, scheme],
                [db, "C-C", "ecr", None, None, r.ecr_cc.mean, r.ecr_cc.stderr, scheme],
                [db, "C-C", "op", op_closed, None, r.op_cc.mean, r.op_cc.stderr, scheme],
            ]
        rows.append([db, "S-C", "sr", sr_sc(cfg, model.G_t, model.G_r, snr).value, None, None,
                     None, "capa-isac"])
    out = _output(args, "baselines.csv")
    write_csv(out, METRIC_HEADER + ("scheme",), rows)
    return [out]


def cmd_gain_dist(args, cfg):
    from .fading import build_channel_model, gain_cdf, gain_pdf
    from .montecarlo import draw_gains

    model = build_channel_model(cfg)
    dist = model.distribution()
    hi = dist.mean + 12.0 * dist.eigenvalues[0]
    x = np.linspace(0.0, hi, args.points)
    out = _output(args, "gain_dist.csv")
    write_csv(out, ("x", "pdf", "cdf"),
              zip(x.tolist(), gain_pdf(dist, x).tolist(), gain_cdf(dist, x).tolist()))
    g, _ = draw_gains(model, cfg.mc_samples, cfg.seed, workers=args.workers)
    counts, edges = np.histogram(g, bins=args.bins, range=(0.0, hi))
    dens = counts / (g.size * np.diff(edges))
    hist = out.with_name(out.stem + "_hist.csv")
    write_csv(hist, ("bin_lo", "bin_hi", "density"),
              zip(edges[:-1].tolist(), edges[1:].tolist(), dens.tolist()))
    return [out, hist]


def cmd_validate(args, cfg):
    from .validation import run_checks

    results = run_checks(cfg, snrs_db=args.snr, n=cfg.mc_samples, n_op=args.op_samples,
                         workers=args.workers)
    width = max(len(r.name) for r in results)
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name:<{width}}  {r.detail}")
    out = None
    if args.output:
        out = Path(args.output)
        write_csv(out, ("check", "passed", "detail"),
                  [(r.name, int(r.passed), r.detail) for r in results])
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return ([out] if out else []), (EXIT_CHECK if failed else EXIT_OK)


def cmd_replay(args):
    """Re-run a recorded command against the config snapshot stored in its manifest."""
    manifest = json.loads(Path(args.manifest).read_text())
    argv = list(manifest["argv"])
    rec = build_parser().parse_args(argv)
    rec.argv = argv
    if args.output:
        rec.output = args.output
    return _execute(rec, config_from_dict(manifest["config"]))


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help=f"JSON config file (default: ${ENV_CONFIG})")
    common.add_argument("--set", action="append", metavar="FIELD=VALUE",
                        help="override one config field; repeatable")
    common.add_argument("--seed", type=int)
    common.add_argument("--samples", type=int, help="Monte Carlo sample count")
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("-o", "--output", help="output CSV path")

    p = _Parser(prog="capa-isac", description=__doc__)
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("spectrum", parents=[common], help="kernel eigenvalues")
    s.add_argument("--modes", type=int, help="number of leading modes (default 4*DoF)")
    s.add_argument("--all", action="store_true", help="write every mode")

    sweep_args = _Parser(add_help=False)
    sweep_args.add_argument("--from", dest="from_", type=float)
    sweep_args.add_argument("--to", type=float)
    sweep_args.add_argument("--step", type=float)

    s = sub.add_parser("metrics", parents=[common, sweep_args],
                       help="closed forms, asymptotes and MC over an SNR or aperture sweep")
    s.add_argument("--sweep", choices=("snr", "aperture"), default="snr",
                   help="snr in dB, aperture in wavelengths")
    s.add_argument("--no-mc", action="store_true")
    s.add_argument("--method", choices=("series", "integral", "auto"), default="auto")

    s = sub.add_parser("pareto", parents=[common], help="SR-CR regions")
    s.add_argument("--taus", type=int, default=101)
    s.add_argument("--splits", type=int, default=21, help="FDSAC grid points per axis")
    s.add_argument("--spacing", type=float, help="SPDA element spacing in meters")
    s.add_argument("--no-baselines", action="store_true")

    s = sub.add_parser("baselines", parents=[common, sweep_args], help="SPDA and FDSAC rates")
    s.add_argument("--spacing", type=float, action="append", help="SPDA spacing (repeatable)")
    s.add_argument("--kappa", type=float, default=0.5)
    s.add_argument("--iota", type=float, default=0.5)

    s = sub.add_parser("gain-dist", parents=[common], help="gain PDF/CDF and sample histogram")
    s.add_argument("--points", type=int, default=400)
    s.add_argument("--bins", type=int, default=80)

    s = sub.add_parser("validate", parents=[common], help="closed form vs Monte Carlo checks")
    s.add_argument("--snr", type=float, action="append", help="SNR in dB (repeatable)")
    s.add_argument("--op-samples", type=int, default=None)

    s = sub.add_parser("replay", help="re-run the command recorded in a manifest")
    s.add_argument("manifest")
    s.add_argument("-o", "--output")
    return p


COMMANDS = {
    "spectrum": cmd_spectrum,
    "metrics": cmd_metrics,
    "pareto": cmd_pareto,
    "baselines": cmd_baselines,
    "gain-dist": cmd_gain_dist,
    "validate": cmd_validate,
}


def _fail(kind: str, message: str, code: int, field: str | None = None) -> int:
    payload = {"error": kind, "message": message}
    if field:
        payload["field"] = field
    print(json.dumps(payload), file=sys.stderr)
    return code


def _execute(args, cfg) -> int:
    if args.workers < 1:
        raise UsageError("--workers must be at least 1")
    result = COMMANDS[args.command](args, cfg)
    code = EXIT_OK
    if isinstance(result, tuple):
        result, code = result
    for out in result:
        write_manifest(out, cfg, args, result)
    return code


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
        args.argv = argv
        if args.command == "replay":
            return cmd_replay(args)
        return _execute(args, resolve_config(args))
    except UsageError as exc:
        return _fail("usage", str(exc), EXIT_USAGE)
    except ConfigError as exc:
        return _fail("config", str(exc), EXIT_USAGE, exc.field)
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        return _fail(type(exc).__name__, str(exc), EXIT_USAGE)
    except Exception as exc:  # noqa: BLE001 - report any failure as JSON
        return _fail(type(exc).__name__, str(exc), EXIT_CHECK)


if __name__ == "__main__":
    sys.exit(main())
