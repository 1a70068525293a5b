"""Command-line front door.

Every subcommand writes three files into a per-run directory under the
output root: records.jsonl (machine-readable payload, byte-reproducible
for a given config and seeds), summary.csv (human table), manifest.json
(config hash, version, timestamps, file list, seed roster).  Exit codes:
0 done, 2 invalid configuration or arguments, 3 numerical refusal.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import datetime
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import RunConfig, config_hash, load_config
from .coupling import COUNTEREXAMPLE
from .disorder import aux_generator
from .errors import RefusalError, ValidationError
from .geometry import Box, cover_disjointness_check, dangerous_cover
from .localization import decay_profile, eigen_decay_experiment
from .montecarlo import (
    coupling_scan,
    estimate_bad_pair_prob,
    pair_resonance_check,
    wegner_check,
)
from .msa import ladder, min_valid_logL0, np_losses
from .operator import draw
from .weights import quasi_metric_constant, verify_quasi_metric

DEFAULT_OUT_ENV = "LOGHOP_OUT"


def _plain(o):
    """Recursively strip numpy and dataclass wrappers for JSON/CSV."""
    if dataclasses.is_dataclass(o) and not isinstance(o, type):
        return _plain(dataclasses.asdict(o))
    if isinstance(o, dict):
        return {str(k): _plain(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_plain(v) for v in o]
    if isinstance(o, np.ndarray):
        return [_plain(v) for v in o.tolist()]
    if isinstance(o, (np.floating, np.integer, np.bool_)):
        return o.item()
    if isinstance(o, complex):
        return {"re": o.real, "im": o.imag}
    if isinstance(o, (float, int, str, bool)) or o is None:
        return o
    return str(o)


class _Run:
    """Accumulates records and writes the three run files at the end."""

    def __init__(self, command: str, out_root: str, run_hash: str, seeds) -> None:
        self.command = command
        self.dir = Path(out_root) / f"{command}-{run_hash}"
        self.seeds = list(seeds)
        self.records: list = []
        self.summary_rows: list = []
        self.summary_header: list = []
        self.started = datetime.datetime.now(datetime.timezone.utc).isoformat()
        self.extra_files: list = []

    def add(self, record, summary_row: dict) -> None:
        self.records.append(_plain(record))
        if not self.summary_header:
            self.summary_header = list(summary_row)
        self.summary_rows.append([_plain(summary_row.get(k)) for k in self.summary_header])

    def write_csv(self, name: str, header: list, rows: list) -> None:
        self.dir.mkdir(parents=True, exist_ok=True)
        with open(self.dir / name, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            w.writerows(rows)
        self.extra_files.append(name)

    def finish(self, run_hash: str) -> Path:
        self.dir.mkdir(parents=True, exist_ok=True)
        with open(self.dir / "records.jsonl", "w") as fh:
            for r in self.records:
                fh.write(json.dumps(r, sort_keys=True) + "\n")
        with open(self.dir / "summary.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(self.summary_header)
            w.writerows(self.summary_rows)
        manifest = {
            "command": self.command,
            "config_hash": run_hash,
            "version": __version__,
            "started": self.started,
            "finished": datetime.datetime.now(datetime.timezone.utc).isoformat(),
            "seeds": self.seeds,
            "outputs": ["records.jsonl", "summary.csv"] + self.extra_files,
        }
        with open(self.dir / "manifest.json", "w") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
        return self.dir


def _out_root(args) -> str:
    if args.out:
        return args.out
    if args.config_obj is not None and args.config_obj.out:
        return args.config_obj.out
    return os.environ.get(DEFAULT_OUT_ENV, "runs")


def _seeds(args) -> list:
    if args.seed is not None:
        return [args.seed]
    if args.config_obj is not None:
        return list(args.config_obj.seeds)
    return [0]


def _trials(args, default: int = 100) -> int:
    if args.trials is not None:
        return args.trials
    if args.config_obj is not None:
        return args.config_obj.trials
    return default


def _workers(args) -> int:
    if args.workers is not None:
        return args.workers
    if args.config_obj is not None:
        return args.config_obj.workers
    return 1


def _need_config(args) -> RunConfig:
    if args.config_obj is None:
        raise ValidationError(f"the {args.command!r} command requires --config")
    return args.config_obj


def _args_hash(args, keys: list) -> str:
    data = {k: getattr(args, k) for k in keys if getattr(args, k, None) is not None}
    return config_hash(data)


def cmd_quasi_metric(args) -> int:
    rho = args.rho if args.rho is not None else (
        args.config_obj.weights.rho if args.config_obj else None
    )
    if rho is None:
        raise ValidationError("quasi-metric requires --rho or a config with msa.rho")
    seed = _seeds(args)[0]
    run_hash = args.config_obj.hash if args.config_obj else _args_hash(args, ["rho", "n_max", "samples", "seed"])
    run = _Run(args.command, _out_root(args), run_hash, [seed])
    for n in range(1, args.n_max + 1):
        cert = quasi_metric_constant(rho, n)
        if n >= 2:
            rng = aux_generator(seed, n)
            xs = 10.0 ** rng.uniform(-3.0, 6.0, size=(args.samples, n))
            report = verify_quasi_metric(rho, n, xs, cert)
            violations = len(report.violations)
        else:
            violations = 0
        run.add(
            {"certificate": cert, "samples": args.samples, "violations": violations},
            {
                "n": n, "rho": rho, "x0": cert.x0, "sup_excess": cert.sup_excess,
                "constant": cert.constant, "violations": violations,
            },
        )
        print(f"n={n}: constant={cert.constant:.9f} violations={violations}")
    print(f"wrote {run.finish(run_hash)}")
    return 0


def cmd_wegner(args) -> int:
    cfg = _need_config(args)
    if args.eps is None:
        raise ValidationError("wegner requires --eps (the spectral distance threshold)")
    energy = args.energy if args.energy is not None else sum(cfg.energy_interval) / 2
    run = _Run(args.command, _out_root(args), cfg.hash, _seeds(args))
    for seed in _seeds(args):
        rep = wegner_check(
            cfg.L, energy, args.eps, cfg.disorder, cfg.d, _trials(args), seed,
            workers=_workers(args), epsilon=cfg.epsilon if args.with_hopping else 0.0,
            kernel=cfg.kernel if args.with_hopping else None,
        )
        run.add(
            rep,
            {
                "seed": seed, "L": rep.L, "eps": rep.eps, "frequency": rep.frequency,
                "ci_low": rep.ci[0], "ci_high": rep.ci[1], "bound": rep.bound,
                "within_bound": rep.within_bound,
            },
        )
        print(
            f"seed={seed}: freq={rep.frequency:.5f} "
            f"ci=({rep.ci[0]:.5f},{rep.ci[1]:.5f}) bound={rep.bound:.5f}"
        )
    print(f"wrote {run.finish(cfg.hash)}")
    return 0


def cmd_pair_resonance(args) -> int:
    cfg = _need_config(args)
    run = _Run(args.command, _out_root(args), cfg.hash, _seeds(args))
    for seed in _seeds(args):
        rep = pair_resonance_check(
            cfg.L, cfg.l, cfg.disorder, cfg.d, cfg.weights, _trials(args), seed,
            workers=_workers(args), epsilon=cfg.epsilon if args.with_hopping else 0.0,
            kernel=cfg.kernel if args.with_hopping else None,
            identical_draws=args.identical_draws,
        )
        run.add(
            rep,
            {
                "seed": seed, "L": rep.L, "l": rep.l, "threshold": rep.threshold,
                "frequency": rep.frequency, "bound": rep.bound, "vacuous": rep.vacuous,
            },
        )
        note = " (vacuous bound)" if rep.vacuous else ""
        print(f"seed={seed}: freq={rep.frequency:.5f} bound={rep.bound:.4g}{note}")
    print(f"wrote {run.finish(cfg.hash)}")
    return 0


def cmd_bad_pair(args) -> int:
    cfg = _need_config(args)
    run = _Run(args.command, _out_root(args), cfg.hash, _seeds(args))
    for seed in _seeds(args):
        rep = estimate_bad_pair_prob(
            cfg.L, cfg.msa.kappa0, cfg.energy_grid, cfg.disorder, cfg.epsilon,
            cfg.kernel, cfg.weights, cfg.d, _trials(args), seed, workers=_workers(args),
        )
        freq = "no-data" if rep.no_data else f"{rep.frequency:.5f}"
        run.add(
            rep,
            {
                "seed": seed, "L": rep.L, "kappa": rep.kappa,
                "grid_points": len(rep.energies), "frequency": freq,
            },
        )
        print(f"seed={seed}: bad-pair frequency {freq} over {len(rep.energies)} energies")
    print(f"wrote {run.finish(cfg.hash)}")
    return 0


def cmd_coupling(args) -> int:
    cfg = _need_config(args)
    energy = args.energy if args.energy is not None else sum(cfg.energy_interval) / 2
    run = _Run(args.command, _out_root(args), cfg.hash, _seeds(args))
    bad = 0
    for seed in _seeds(args):
        rep = coupling_scan(
            cfg.l, energy, cfg.msa.kappa0, cfg.msa, cfg.disorder, cfg.epsilon,
            cfg.kernel, _trials(args), seed, workers=_workers(args),
        )
        bad += rep.n_counterexample
        run.add(
            rep,
            {
                "seed": seed, "l": rep.l, "L": rep.L, "pass": rep.n_pass,
                "counterexample": rep.n_counterexample,
                "not_applicable": rep.n_not_applicable,
            },
        )
        print(
            f"seed={seed}: PASS={rep.n_pass} {COUNTEREXAMPLE}={rep.n_counterexample} "
            f"NOT-APPLICABLE={rep.n_not_applicable} tightest={rep.tightest_counts}"
        )
    print(f"wrote {run.finish(cfg.hash)}")
    return 0 if bad == 0 else 1


def cmd_ladder(args) -> int:
    if args.config_obj is not None:
        params = args.config_obj.msa
        run_hash = args.config_obj.hash
    else:
        from .msa import MSAParams
        from .weights import WeightParams

        needed = ["gamma", "rho", "rho_prime", "alpha", "p", "kappa0", "kappa_inf"]
        missing = [k for k in needed if getattr(args, k) is None]
        if missing:
            raise ValidationError(f"ladder requires --config or flags: {', '.join(missing)}")
        params = MSAParams(
            alpha=args.alpha, p=args.p, d=args.d,
            weights=WeightParams(args.gamma, args.rho, args.rho_prime),
            kappa0=args.kappa0, kappa_inf=args.kappa_inf,
        )
        run_hash = _args_hash(args, needed + ["d", "horizon"])
    run = _Run(args.command, _out_root(args), run_hash, _seeds(args))
    log_l0 = min_valid_logL0(params)
    lad = ladder(params, log_l0, args.horizon)
    run.add(
        {
            "min_logL0": log_l0, "horizon": lad.horizon, "valid": lad.valid,
            "kappa_final": lad.kappa[-1], "total_loss": lad.total_loss,
            "series_bound": lad.series_bound,
        },
        {
            "min_logL0": log_l0, "valid": lad.valid, "kappa0": params.kappa0,
            "kappa_final": lad.kappa[-1], "total_loss": lad.total_loss,
            "series_bound": lad.series_bound,
        },
    )
    losses = np_losses(params, lad.logL[:-1])
    run.write_csv(
        "trajectory.csv",
        ["step", "logL", "kappa", "step_loss"],
        [
            [s, lad.logL[s], lad.kappa[s], losses[s] if s < len(losses) else ""]
            for s in range(len(lad.kappa))
        ],
    )
    print(f"minimal admissible logL0 = {log_l0:.6g}")
    print(
        f"ladder: {lad.horizon} steps, kappa {params.kappa0} -> {lad.kappa[-1]:.6g}, "
        f"valid={lad.valid}, iterated loss {lad.total_loss:.6g} "
        f"<= series bound {lad.series_bound:.6g}"
    )
    print(f"wrote {run.finish(run_hash)}")
    return 0


def cmd_eigen_decay(args) -> int:
    cfg = _need_config(args)
    side = args.side if args.side is not None else 2 * cfg.L + 1
    window = tuple(args.window) if args.window else None
    res = eigen_decay_experiment(
        cfg.d, side, cfg.kernel, cfg.disorder, cfg.epsilon, _seeds(args),
        energy_window=window, workers=_workers(args), msa=cfg.msa,
    )
    run = _Run(args.command, _out_root(args), cfg.hash, _seeds(args))
    for r in res.records:
        run.add(
            r,
            {
                "seed": r.seed, "eigenvalue": r.eigenvalue, "center": r.center,
                "c": r.c, "rho_fit": r.rho_fit, "r2": r.r2, "pr": r.pr, "ok": r.ok,
            },
        )
    run.write_csv(
        "ensemble.csv",
        ["n_vectors", "n_fits", "median_c", "median_rho", "median_r2",
         "hopping_gamma", "hopping_exponent", "predicted_coefficient"],
        [[res.n_vectors, res.n_fits, res.median_c, res.median_rho, res.median_r2,
          res.hopping_gamma, res.hopping_exponent, res.predicted_coefficient]],
    )
    _write_profiles(run, cfg, side, _seeds(args)[0], res, args.profiles)
    print(
        f"{res.n_fits}/{res.n_vectors} fits: median c={res.median_c:.4g} "
        f"rho={res.median_rho:.4g} r2={res.median_r2:.4g} "
        f"(hopping gamma={res.hopping_gamma}, exponent={res.hopping_exponent})"
    )
    print(f"wrote {run.finish(cfg.hash)}")
    return 0


def _write_profiles(run: _Run, cfg: RunConfig, side: int, seed: int, res, n_profiles: int) -> None:
    """Plot-ready decay columns for the best-fitting vectors of one seed."""
    if n_profiles <= 0:
        return
    best = sorted(
        (r for r in res.records if r.ok and r.seed == seed),
        key=lambda r: -r.r2,
    )[:n_profiles]
    if not best:
        return
    box = Box((0,) * cfg.d, (side - 1) // 2)
    sample = draw(box, cfg.disorder, cfg.epsilon, cfg.kernel, seed, 0)
    w, u = np.linalg.eigh(sample.matrix)
    sites = box.sites()
    rows = []
    for rec in best:
        j = int(np.argmin(np.abs(w - rec.eigenvalue)))
        r, t, y = decay_profile(u[:, j], sites, family=res.family)
        rows += [[seed, rec.eigenvalue, ri, ti, yi] for ri, ti, yi in zip(r, t, y)]
    run.write_csv(
        "profiles.csv", ["seed", "eigenvalue", "r", "regressor", "log_neg_log_psi"], rows
    )


def cmd_cover_check(args) -> int:
    l = args.l if args.l is not None else (args.config_obj.l if args.config_obj else None)
    d = args.d if args.d is not None else (args.config_obj.d if args.config_obj else None)
    if l is None or d is None:
        raise ValidationError("cover-check requires --l and --d (or a config)")
    radius = args.parent_L if args.parent_L is not None else 30 * l
    seed = _seeds(args)[0]
    run_hash = (
        args.config_obj.hash if args.config_obj
        else _args_hash(args, ["l", "d", "parent_L", "trials", "seed"])
    )
    run = _Run(args.command, _out_root(args), run_hash, [seed])
    parent = Box((0,) * d, radius)
    rng = aux_generator(seed, 0)
    failures = 0
    for t in range(_trials(args)):
        k = int(rng.integers(0, 4))
        centers = [
            tuple(int(v) for v in rng.integers(-(radius - l), radius - l + 1, size=d))
            for _ in range(k)
        ]
        cover = dangerous_cover(centers, parent, l)
        check = cover_disjointness_check(cover, centers, l)
        ok = check.ok and cover.total_diameter <= 52 * l
        failures += not ok
        run.add(
            {"trial": t, "centers": centers, "case": cover.case, "ok": ok,
             "witness": check.witness},
            {"trial": t, "case": cover.case, "n_centers": k, "ok": ok},
        )
    print(f"{_trials(args)} covers checked, {failures} failures")
    print(f"wrote {run.finish(run_hash)}")
    return 0 if failures == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="TOML run configuration")
    common.add_argument("--seed", type=int, help="override the seed roster with one seed")
    common.add_argument("--trials", type=int, help="Monte Carlo trials per seed")
    common.add_argument("--workers", type=int, help="worker processes")
    common.add_argument("--out", help=f"output root (default ${DEFAULT_OUT_ENV} or ./runs)")

    p = argparse.ArgumentParser(prog="loghop", description=__doc__)
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("quasi-metric", parents=[common],
                       help="certify the weight chain constant per tuple size")
    q.add_argument("--rho", type=float)
    q.add_argument("--n-max", type=int, default=8, dest="n_max")
    q.add_argument("--samples", type=int, default=10000)
    q.set_defaults(func=cmd_quasi_metric)

    wg = sub.add_parser("wegner", parents=[common],
                        help="spectral near-hit frequency vs the analytic bound")
    wg.add_argument("--eps", type=float, help="spectral distance threshold")
    wg.add_argument("--energy", type=float)
    wg.add_argument("--with-hopping", action="store_true", dest="with_hopping")
    wg.set_defaults(func=cmd_wegner)

    pr = sub.add_parser("pair-resonance", parents=[common],
                        help="spectra of two independent cubes nearly colliding")
    pr.add_argument("--identical-draws", action="store_true", dest="identical_draws")
    pr.add_argument("--with-hopping", action="store_true", dest="with_hopping")
    pr.set_defaults(func=cmd_pair_resonance)

    bp = sub.add_parser("bad-pair", parents=[common],
                        help="frequency of two cubes simultaneously bad on the energy grid")
    bp.set_defaults(func=cmd_bad_pair)

    cp = sub.add_parser("coupling", parents=[common],
                        help="two-scale implication check over random draws")
    cp.add_argument("--energy", type=float)
    cp.set_defaults(func=cmd_coupling)

    ld = sub.add_parser("ladder", parents=[common],
                        help="log-domain scale ladder and minimal starting scale")
    for name in ("gamma", "rho", "rho_prime", "alpha", "p", "kappa0", "kappa_inf"):
        ld.add_argument(f"--{name.replace('_', '-')}", type=float, dest=name)
    ld.add_argument("--d", type=int, default=1)
    ld.add_argument("--horizon", type=int, default=1000)
    ld.set_defaults(func=cmd_ladder)

    ed = sub.add_parser("eigen-decay", parents=[common],
                        help="ensemble eigenvector decay fits")
    ed.add_argument("--side", type=int, help="sites per axis (default 2L+1 from config)")
    ed.add_argument("--window", type=float, nargs=2, metavar=("LO", "HI"))
    ed.add_argument("--profiles", type=int, default=3,
                    help="plot-ready profiles to export for the first seed")
    ed.set_defaults(func=cmd_eigen_decay)

    cc = sub.add_parser("cover-check", parents=[common],
                        help="randomized isolation-cover invariants")
    cc.add_argument("--l", type=int)
    cc.add_argument("--d", type=int)
    cc.add_argument("--parent-L", type=int, dest="parent_L")
    cc.set_defaults(func=cmd_cover_check)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.config_obj = load_config(args.config) if args.config else None
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except RefusalError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return 3
