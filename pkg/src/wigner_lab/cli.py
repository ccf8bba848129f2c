"""Command-line entry point wiring every study to CSV / JSON / manifest output.

Subcommands: dos, wegner, gaps, deloc, corr, invmom, schur-check, gue-oracle.
All randomness derives from --seed and per-trial indices, so identical
invocations produce byte-identical CSVs regardless of --jobs.
"""

from __future__ import annotations

import argparse
import datetime
import json
import sys

from . import __version__
from .distributions import make_builtin
from .ensemble import EnsembleSpec, gue_oracle_report
from .errors import WignerLabError
from .inverse_moments import inverse_moment_study
from .report import RunManifest, StatReport, write_csv, write_json
from .runner import JOBS_ENV_VAR, resolve_jobs
from .schur import schur_identity_check
from .spectral import dos_estimate
from .universality import CorrelationQuery, DelocQuery, deloc_statistic, two_point_correlation
from .wegner import WegnerQuery, gap_tail, wegner_probability


def parse_law(text: str):
    """Parse a law string "name:variance[:sigma_mix]"."""
    parts = text.split(":")
    if len(parts) not in (2, 3):
        raise WignerLabError(f"malformed law {text!r}; expected name:variance[:sigma_mix]")
    name = parts[0]
    try:
        variance = float(parts[1])
        sigma_mix = float(parts[2]) if len(parts) == 3 else None
    except ValueError as exc:
        raise WignerLabError(f"malformed law {text!r}: {exc}") from exc
    return make_builtin(name, variance, sigma_mix)


def parse_spec(text: str, diag: str | None = None, *, N: int, seed: int) -> EnsembleSpec:
    """Ensemble spec from an off-diagonal law string, with variance gates.

    The off-diagonal component variance must be exactly 1/2 and the diagonal
    variance exactly 1 (E x_jk^2 = 1/2, E x_jj^2 = 1); anything else is
    rejected.  When --diag is omitted, the diagonal uses the same family with
    variance 1.
    """
    offdiag = parse_law(text)
    if offdiag.variance != 0.5:
        raise WignerLabError(
            f"off-diagonal law must have variance 1/2 (E x_jk^2 = 1/2), got {text!r}"
        )
    if diag is None:
        parts = text.split(":")
        diag_text = ":".join([parts[0], "1"] + parts[2:])
    else:
        diag_text = diag
    diag_law = parse_law(diag_text)
    if diag_law.variance != 1.0:
        raise WignerLabError(
            f"diagonal law must have variance 1 (E x_jj^2 = 1), got {diag_text!r}"
        )
    return EnsembleSpec(N=N, offdiag=offdiag, diag=diag_law, seed=seed)


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x]


def _ints(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x]


def _add_common(p: argparse.ArgumentParser, *, trials_default=None) -> None:
    p.add_argument("--seed", type=int, default=1, help="master seed (default 1)")
    p.add_argument("--trials", type=int, default=trials_default, help="number of Monte Carlo trials")
    p.add_argument("--jobs", type=int, default=None,
                   help=f"worker processes (default ${JOBS_ENV_VAR} or 1); results do not depend on it")
    p.add_argument("--out-csv", default=None, help="CSV output path (default <subcommand>.csv)")
    p.add_argument("--out-json", default=None, help="JSON output path (default <subcommand>.json)")
    p.add_argument("--out-manifest", default=None, help="manifest path (default <csv>.manifest.json)")


def _add_ensemble(p: argparse.ArgumentParser) -> None:
    p.add_argument("--spec", default="gaussian:0.5", help='off-diagonal law "name:variance[:sigma_mix]"')
    p.add_argument("--diag", default=None, help="diagonal law (default: same family, variance 1)")
    p.add_argument("--N", type=int, required=True, help="matrix dimension")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="wigner-lab", description=__doc__)
    ap.add_argument("--version", action="version", version=f"wigner-lab {__version__}")
    sub = ap.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("dos", help="density of states on macro/meso/micro intervals")
    _add_ensemble(p)
    p.add_argument("--E", type=_floats, default=[0.0], help="energies, comma separated")
    p.add_argument("--scale", choices=("macro", "meso", "micro"), default="micro")
    p.add_argument("--eta", type=float, default=None, help="interval width (macro)")
    p.add_argument("--theta", type=float, default=0.5, help="meso exponent: eta = N^-theta")
    p.add_argument("--K", type=_floats, default=None, help="micro widths K (eta = K/N), comma separated")
    _add_common(p, trials_default=100)

    p = sub.add_parser("wegner", help="P(at least one eigenvalue in [E - eps/2N, E + eps/2N]) vs eps")
    _add_ensemble(p)
    p.add_argument("--E", type=float, default=0.0)
    p.add_argument("--kappa", type=float, default=0.5, help="bulk margin, requires |E| <= 2 - kappa")
    p.add_argument("--eps", type=_floats, default=[0.05, 0.1, 0.2, 0.4], help="epsilon grid")
    _add_common(p, trials_default=20000)

    p = sub.add_parser("gaps", help="tail of the rescaled gap above a fixed energy")
    _add_ensemble(p)
    p.add_argument("--E", type=float, default=0.0)
    p.add_argument("--K-grid", dest="K_grid", type=_floats, default=[1, 2, 4, 8, 16])
    _add_common(p, trials_default=5000)

    p = sub.add_parser("deloc", help="eigenvector delocalization statistics")
    _add_ensemble(p)
    p.add_argument("--E", type=float, default=0.0)
    p.add_argument("--K", type=float, default=5.0, help="window half-width in units of 1/N")
    p.add_argument("--p", default="4", help="norm exponent (> 2) or 'inf'")
    _add_common(p, trials_default=100)

    p = sub.add_parser("corr", help="two-point correlation vs the sine-kernel determinant")
    _add_ensemble(p)
    p.add_argument("--E", type=float, default=0.0)
    p.add_argument("--W", type=float, default=10.0, help="rescaled window half-width")
    p.add_argument("--s-grid", dest="s_grid", type=_floats,
                   default=[0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0, 2.5, 3.0, 4.0])
    p.add_argument("--bin-width", dest="bin_width", type=float, default=0.25)
    _add_common(p, trials_default=300)

    p = sub.add_parser("invmom", help="inverse moments of frame overlaps")
    p.add_argument("--law", default="gaussian:0.5", help='component law "name:variance[:sigma_mix]"')
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--N", type=_ints, default=[10, 100, 1000], help="ambient dimensions, comma separated")
    p.add_argument("--frame", default="fourier_rows",
                   choices=("standard_basis", "random_orthonormal", "fourier_rows"))
    p.add_argument("--samples", type=int, default=100_000)
    _add_common(p)

    p = sub.add_parser("schur-check", help="residuals of the diagonal-resolvent identities")
    _add_ensemble(p)
    p.add_argument("--E-values", dest="E_values", type=_floats, default=[0.0, 1.0])
    p.add_argument("--eps-values", dest="eps_values", type=_floats, default=[1e-3, 0.1])
    _add_common(p, trials_default=5)

    p = sub.add_parser("gue-oracle", help="N = 2 sampler vs the closed-form joint eigenvalue density")
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--bins", type=int, default=50)
    p.add_argument("--span", type=float, default=3.0)
    _add_common(p)

    return ap


def _run_subcommand(args) -> StatReport:
    jobs = resolve_jobs(args.jobs)
    name = args.subcommand
    if name == "invmom":
        law = parse_law(args.law)
        return inverse_moment_study(
            law, args.m, args.r, args.N, frame=args.frame,
            samples=args.samples, seed=args.seed, jobs=jobs,
        )
    if name == "gue-oracle":
        spec = parse_spec("gaussian:0.5", None, N=2, seed=args.seed)
        return gue_oracle_report(spec, args.samples, bins=args.bins, span=args.span, jobs=jobs)

    spec = parse_spec(args.spec, args.diag, N=args.N, seed=args.seed)
    if name == "dos":
        reports = []
        K_list = args.K if args.K else [None]
        for E in args.E:
            for K in K_list:
                reports.append(dos_estimate(
                    spec, E, args.scale, eta=args.eta, theta=args.theta, K=K,
                    trials=args.trials, jobs=jobs,
                ))
        rows = tuple(r for rep in reports for r in rep.rows)
        extra = {
            "targets": [rep.extra["target"] for rep in reports],
            "failed_trials": sum(rep.extra["failed_trials"] for rep in reports),
        }
        return StatReport(statistic="dos", columns=reports[0].columns, rows=rows,
                          trials=args.trials, seed=args.seed, extra=extra)
    if name == "wegner":
        query = WegnerQuery(E=args.E, kappa=args.kappa, epsilon_grid=tuple(args.eps),
                            N=args.N, trials=args.trials)
        return wegner_probability(query, spec, jobs=jobs)
    if name == "gaps":
        return gap_tail(spec, args.E, args.K_grid, args.trials, jobs=jobs)
    if name == "deloc":
        p_norm = float("inf") if args.p == "inf" else float(args.p)
        query = DelocQuery(E=args.E, K=args.K, p=p_norm, N=args.N, trials=args.trials)
        return deloc_statistic(query, spec, jobs=jobs)
    if name == "corr":
        query = CorrelationQuery(E=args.E, s_grid=tuple(args.s_grid), W=args.W,
                                 N=args.N, trials=args.trials, bin_width=args.bin_width)
        return two_point_correlation(query, spec, jobs=jobs)
    if name == "schur-check":
        return schur_identity_check(spec, args.E_values, args.eps_values, args.trials, jobs=jobs)
    raise WignerLabError(f"unknown subcommand {name!r}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    started = datetime.datetime.now(datetime.timezone.utc).isoformat()
    try:
        report = _run_subcommand(args)
    except WignerLabError as exc:
        json.dump({"error": type(exc).__name__, "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return 2

    slug = args.subcommand.replace("-", "_")
    csv_path = args.out_csv or f"{slug}.csv"
    json_path = args.out_json or f"{slug}.json"
    manifest_path = args.out_manifest or f"{csv_path}.manifest.json"
    write_csv(report, csv_path)
    write_json(report, json_path)
    config = {k: v for k, v in vars(args).items() if k not in ("out_csv", "out_json", "out_manifest")}
    manifest = RunManifest(
        subcommand=args.subcommand,
        config={k: repr(v) for k, v in sorted(config.items())},
        tool_version=__version__,
        master_seed=args.seed,
        trials=report.trials,
        jobs=resolve_jobs(args.jobs),
        started_at=started,
        finished_at=datetime.datetime.now(datetime.timezone.utc).isoformat(),
        failed_trials=int(report.extra.get("failed_trials", 0)),
        effective_trials=int(report.extra.get("effective_trials", report.trials)),
        outputs={"csv": str(csv_path), "json": str(json_path)},
    )
    manifest.write(manifest_path)
    print(f"{args.subcommand}: {len(report.rows)} rows -> {csv_path}, {json_path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
