"""Command-line front end wiring the library into reproducible experiments.

Every run is a pure function of its flags: the RNG is a counter-based
generator (Philox) keyed by --seed, Monte Carlo work is sharded into fixed
chunks whose streams are spawned up front, and output formatting is
deterministic, so reruns with the same seed produce identical bytes no
matter how many workers are used.

Output formats: ``csv`` (one '#'-prefixed JSON metadata line, then a header
and rows), ``json`` (metadata plus the payload), and ``table`` (aligned text
for eyeballing).  Exit codes: 0 on success, 1 when an internal assertion
fails, 2 on configuration errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import __version__
from . import benford_stats, collatz, equidist, rmt, zeta
from .core_numeric import DomainError, leading_digit, random_bignat

WORKERS_ENV = "BENFORD_LAB_WORKERS"

DEFAULT_CENSUS_START = 419_753_999_998_525
DEFAULT_CENSUS_COUNT = 100_000
DEFAULT_M = 10
DEFAULT_BIG_DIGITS = 100_000

COLLATZ_PRESETS = {
    "ratio-base4": {"kind": "ratio", "base": 4},
    "ratio-base8": {"kind": "ratio", "base": 8},
    "ratio-base10": {"kind": "ratio", "base": 10},
    "ratio-base16": {"kind": "ratio", "base": 16},
    "bignum-remove2": {"kind": "bignum", "mode": "remove_all_twos"},
    "bignum-single": {"kind": "bignum", "mode": "single_step"},
}

ZETA_PRESETS = {
    # 65536 grid points t = k/4 on the critical line
    "halfline-digits": {"t_start": 0.0, "t_end": 16383.75, "step": 0.25,
                        "sigma": 0.5, "base": 10},
}


class ConfigError(Exception):
    pass


class CheckFailed(Exception):
    pass


@dataclass
class ExperimentConfig:
    command: str
    params: dict
    rng_seed: int
    workers: int
    out: str
    fmt: str

    def meta_line(self) -> str:
        doc = {"command": self.command, "params": self.params,
               "seed": self.rng_seed, "workers": self.workers,
               "version": __version__}
        return "# " + json.dumps(doc, sort_keys=True)


def _open_out(path):
    if path in (None, "-"):
        return sys.stdout, False
    return open(path, "w", encoding="utf-8"), True


def emit(cfg: ExperimentConfig, columns, rows, table_text: str = "",
         json_payload=None) -> None:
    stream, owned = _open_out(cfg.out)
    try:
        if cfg.fmt == "csv":
            print(cfg.meta_line(), file=stream)
            print(",".join(columns), file=stream)
            for row in rows:
                print(",".join(str(c) for c in row), file=stream)
        elif cfg.fmt == "json":
            doc = {"meta": json.loads(cfg.meta_line()[2:])}
            if json_payload is not None:
                doc.update(json_payload)
            else:
                doc.update({"columns": list(columns),
                            "rows": [list(r) for r in rows]})
            print(json.dumps(doc, sort_keys=True), file=stream)
        else:
            print(cfg.meta_line(), file=stream)
            print(table_text, file=stream)
    finally:
        if owned:
            stream.close()


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def _resolve_alpha(text: str):
    """Accept a float literal, 'p/q' (exact rational), or 'log:X:B' for a
    500-digit log_B(X)."""
    if text.startswith("log:"):
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError("log alpha form must look like log:2:10")
        return equidist.log_ratio(int(parts[1]), int(parts[2]))
    if "/" in text:
        num, den = text.split("/", 1)
        return Fraction(int(num), int(den))
    try:
        return float(text)
    except ValueError as exc:
        raise ConfigError(f"cannot parse alpha {text!r}") from exc


def _report_rows(report: benford_stats.TestReport):
    return [(d, f"{o:.6f}", f"{p:.6f}", f"{z:.4f}")
            for d, o, p, z in report.per_digit]


# ---------------------------------------------------------------- commands --

def cmd_digits(args, cfg: ExperimentConfig) -> int:
    sys.set_int_max_str_digits(2_000_000)
    values = []
    try:
        with open(args.file, encoding="utf-8") as fh:
            for ln, line in enumerate(fh, start=1):
                text = line.strip()
                if not text:
                    continue
                try:
                    values.append(int(text))
                except ValueError:
                    try:
                        values.append(float(text))
                    except ValueError:
                        raise ConfigError(
                            f"{args.file}:{ln}: cannot parse {text!r}")
    except OSError as exc:
        raise ConfigError(str(exc))
    if not values:
        raise ConfigError(f"{args.file} holds no values")
    digits = []
    for ln, v in enumerate(values, start=1):
        try:
            digits.append(leading_digit(v, args.base))
        except DomainError as exc:
            raise ConfigError(f"value {ln}: {exc}")
    hist = benford_stats.DigitHistogram.from_digits(digits, args.base)
    report = benford_stats.z_statistics(hist)
    emit(cfg, ("digit", "observed", "benford", "z"), _report_rows(report),
         report.to_text_table(), {"report": json.loads(report.to_json())})
    return 0


def _collatz_ratio_run(args, cfg, base) -> int:
    cfg.params["base"] = base
    seeds = collatz.census_1mod6(args.start, args.count)
    result = collatz.ratio_digit_experiment(seeds, args.iterations, base)
    freq = result.observed_freq()
    rows = [(d, f"{freq[d - 1]:.6f}", f"{result.predicted[d - 1]:.6f}")
            for d in range(1, base)]
    emit(cfg, ("digit", "observed", "predicted"), rows,
         result.to_text_table(),
         {"observed": [float(x) for x in freq],
          "predicted": [float(x) for x in result.predicted]})
    return 0


def _collatz_bignum_run(args, cfg, mode) -> int:
    cfg.params["mode"] = mode
    seed_value = random_bignat(args.digits, 10, _rng(cfg.rng_seed))
    result = collatz.iterate_digit_experiment(seed_value, mode,
                                              base=args.base)
    report = benford_stats.z_statistics(result.histogram)
    table = (f"iterates recorded: {result.n_recorded} "
             f"(reached 1: {result.reached_one})\n" + report.to_text_table())
    emit(cfg, ("digit", "observed", "benford", "z"), _report_rows(report),
         table, {"n_recorded": result.n_recorded,
                 "reached_one": result.reached_one,
                 "report": json.loads(report.to_json())})
    return 0


def cmd_collatz_experiment(args, cfg: ExperimentConfig) -> int:
    if args.preset:
        if args.preset not in COLLATZ_PRESETS:
            raise ConfigError(f"unknown preset {args.preset!r}; choose from "
                              f"{sorted(COLLATZ_PRESETS)}")
        preset = COLLATZ_PRESETS[args.preset]
        if preset["kind"] == "ratio":
            return _collatz_ratio_run(args, cfg, preset["base"])
        return _collatz_bignum_run(args, cfg, preset["mode"])
    if args.mode:
        return _collatz_bignum_run(args, cfg, args.mode)
    return _collatz_ratio_run(args, cfg, args.base)


def cmd_collatz_structure(args, cfg: ExperimentConfig) -> int:
    ktuple = tuple(int(k) for k in args.ktuple.split(","))
    try:
        pred = collatz.inverse_path_bruteforce(ktuple, args.limit)
    except collatz.StructureError as exc:
        raise CheckFailed(str(exc))
    rows = [(pred.modulus, pred.residues[0], pred.residues[1])]
    emit(cfg, ("modulus", "residue1", "residue2"), rows,
         f"modulus {pred.modulus}; residues {pred.residues[0]}, "
         f"{pred.residues[1]} (classes mod 6: "
         f"{pred.residues[0] % 6}, {pred.residues[1] % 6})",
         {"modulus": pred.modulus, "residues": list(pred.residues)})
    return 0


def cmd_collatz_kvalues(args, cfg: ExperimentConfig) -> int:
    seeds = collatz.census_1mod6(args.start, args.count)
    stats = collatz.kvalue_histogram(collatz.THREE_X_PLUS_1, seeds,
                                     args.iterations)
    rows = [(n, int(stats.counts[n]), f"{stats.empirical(n):.8f}",
             f"{stats.reference(n):.8f}")
            for n in range(1, 16) if stats.counts[n] or n <= 10]
    table = "\n".join(
        f"k={n:<3d} count={int(stats.counts[n]):>9d} "
        f"empirical={stats.empirical(n):.6f} reference={stats.reference(n):.6f}"
        for n, *_ in rows)
    table += (f"\nmean={stats.mean:.5f} (reference 2)  "
              f"variance={stats.variance:.5f} (reference 2)")
    emit(cfg, ("k", "count", "empirical", "reference"), rows, table,
         {"mean": stats.mean, "variance": stats.variance,
          "counts": stats.counts.tolist()})
    return 0


def cmd_collatz_ratio(args, cfg: ExperimentConfig) -> int:
    seeds = collatz.census_1mod6(args.start, args.count)
    result = collatz.ratio_digit_experiment(seeds, args.iterations, args.base)
    fracs = collatz.ratio_fracs(seeds, args.iterations, args.base)
    model = collatz.geometric_model_points(args.iterations, args.base,
                                           len(fracs), _rng(cfg.rng_seed))
    ks = collatz.ks_distance(fracs, model)
    freq = result.observed_freq()
    rows = [(d, f"{freq[d - 1]:.6f}", f"{result.predicted[d - 1]:.6f}")
            for d in range(1, args.base)]
    table = result.to_text_table() + \
        f"\nKS distance to the geometric-sum model: {ks:.5f}"
    emit(cfg, ("digit", "observed", "predicted"), rows, table,
         {"observed": [float(x) for x in freq], "ks_vs_model": ks})
    return 0


def cmd_collatz_model(args, cfg: ExperimentConfig) -> int:
    hist = collatz.model_digit_experiment(args.iterations, args.base,
                                          args.samples, _rng(cfg.rng_seed))
    freq = hist.frequencies()
    predicted = collatz.limit_law_digit_probabilities(args.base)
    rows = [(d, f"{freq[d - 1]:.6f}", f"{predicted[d - 1]:.6f}")
            for d in range(1, args.base)]
    table = "\n".join(f"digit {d}: observed {freq[d - 1]:.4f} "
                      f"predicted {predicted[d - 1]:.4f}"
                      for d in range(1, args.base))
    emit(cfg, ("digit", "observed", "predicted"), rows, table,
         {"observed": [float(x) for x in freq]})
    return 0


def cmd_zeta(args, cfg: ExperimentConfig) -> int:
    params = dict(t_start=args.t_start, t_end=args.t_end, step=args.step,
                  sigma=args.sigma, base=args.base)
    if args.preset:
        if args.preset not in ZETA_PRESETS:
            raise ConfigError(f"unknown preset {args.preset!r}")
        params.update(ZETA_PRESETS[args.preset])
    if args.near_critical_delta is not None:
        mode = zeta.SigmaMode.near_critical(args.near_critical_delta)
    else:
        mode = zeta.SigmaMode.fixed(params["sigma"])
    cfg.params.update(params)
    try:
        result = zeta.scan_line(params["t_start"], params["t_end"],
                                params["step"], mode, base=params["base"])
    except DomainError as exc:
        raise ConfigError(str(exc))
    report = benford_stats.z_statistics(result.histogram)
    table = (f"points recorded: {result.histogram.total}, "
             f"skipped: {len(result.skipped)}, refined: {result.refined}\n"
             + report.to_text_table())
    rows = (s.csv_row() for s in result.samples)
    emit(cfg, zeta.ScanResult.CSV_COLUMNS, rows, table,
         {"histogram": result.histogram.counts.tolist(),
          "skipped": len(result.skipped), "refined": result.refined,
          "report": json.loads(report.to_json())})
    return 0


def cmd_cue(args, cfg: ExperimentConfig) -> int:
    result = rmt.cue_experiment(args.dim, args.samples, args.base,
                                _rng(cfg.rng_seed), workers=cfg.workers)
    stat, dof = benford_stats.chi_square(result.histogram)
    table = (f"moments: {result.moments.to_json()}\n"
             f"digit chi-square: {stat:.3f} on {dof} dof\n"
             + benford_stats.z_statistics(result.histogram).to_text_table())
    emit(cfg, rmt.CueResult.CSV_COLUMNS, result.csv_rows(), table,
         {"moments": json.loads(result.moments.to_json()),
          "chi_square": stat, "dof": dof,
          "histogram": result.histogram.counts.tolist()})
    return 0


def cmd_equidist_kalpha(args, cfg: ExperimentConfig) -> int:
    alpha = _resolve_alpha(args.alpha)
    pts = equidist.kalpha_points(alpha, args.count)
    report = benford_stats.discrepancy_report(pts, m=args.et_m)
    rows = [(report.n_points, f"{report.star:.8e}", f"{report.extreme:.8e}",
             f"{report.erdos_turan:.8e}", report.m_used)]
    emit(cfg, ("n_points", "star", "extreme", "erdos_turan", "m"), rows,
         report.to_text_table(), {"report": json.loads(report.to_json())})
    return 0


def cmd_equidist_cf(args, cfg: ExperimentConfig) -> int:
    alpha = _resolve_alpha(args.alpha)
    try:
        convs = equidist.continued_fraction(alpha, args.depth, dps=args.dps)
    except (equidist.PrecisionError, DomainError) as exc:
        raise ConfigError(str(exc))
    rows = [(p, q) for p, q in convs]
    table = "\n".join(f"{p}/{q}" for p, q in convs)
    emit(cfg, ("p", "q"), rows, table,
         {"convergents": [[str(p), str(q)] for p, q in convs]})
    return 0


def cmd_equidist_type(args, cfg: ExperimentConfig) -> int:
    alpha = _resolve_alpha(args.alpha)
    gammas = tuple(float(g) for g in args.gammas.split(","))
    try:
        probe = equidist.type_probe(alpha, args.depth, gammas, dps=args.dps)
    except (equidist.PrecisionError, DomainError) as exc:
        raise ConfigError(str(exc))
    rows = list(probe.to_csv_rows())
    header, rows = rows[0], rows[1:]
    table = "\n".join(",".join(r) for r in [header] + rows)
    table += f"\nempirical type: {probe.empirical_type}"
    emit(cfg, header, rows, table,
         {"empirical_type": probe.empirical_type,
          "slopes": {f"{g:g}": s for g, s in probe.slopes.items()}})
    return 0


def cmd_poisson_check(args, cfg: ExperimentConfig) -> int:
    sigmas = [float(s) for s in args.sigmas.split(",")]
    rows = []
    worst = 0.0
    for s in sigmas:
        r = equidist.theta_identity_residual(s, args.cutoff)
        worst = max(worst, r)
        rows.append((f"{s:g}", f"{r:.3e}"))
    table = "\n".join(f"sigma={s:<8} residual={r}" for s, r in rows)
    table += f"\nmax residual: {worst:.3e}"
    emit(cfg, ("sigma", "residual"), rows, table,
         {"max_residual": worst})
    if worst >= 1e-12:
        raise CheckFailed(f"theta identity residual {worst:.3e} >= 1e-12")
    return 0


# ------------------------------------------------------------------ parser --

def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0, help="RNG seed (Philox)")
    p.add_argument("--workers", type=int, default=None,
                   help=f"worker count (default ${WORKERS_ENV} or 1)")
    p.add_argument("--out", default="-", help="output path ('-' = stdout)")
    p.add_argument("--format", dest="fmt", default="table",
                   choices=("csv", "json", "table"))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="benford-lab",
        description="Leading-digit statistics of dynamical systems")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("digits", help="digit report for a file of numbers")
    p.add_argument("file")
    p.add_argument("--base", type=int, default=10)
    _add_common(p)
    p.set_defaults(func=cmd_digits)

    pc = sub.add_parser("collatz", help="3x+1 experiments")
    csub = pc.add_subparsers(dest="subcommand", required=True)

    p = csub.add_parser("experiment", help="census/trajectory digit tables")
    p.add_argument("--preset", default=None,
                   help=f"one of {sorted(COLLATZ_PRESETS)}")
    p.add_argument("--start", type=int, default=DEFAULT_CENSUS_START)
    p.add_argument("--count", type=int, default=DEFAULT_CENSUS_COUNT)
    p.add_argument("--iterations", "-m", type=int, default=DEFAULT_M)
    p.add_argument("--base", type=int, default=4)
    p.add_argument("--mode", choices=collatz.MODES, default=None,
                   help="trajectory mode (bignum experiments)")
    p.add_argument("--digits", type=int, default=DEFAULT_BIG_DIGITS,
                   help="decimal size of the random bignum seed")
    _add_common(p)
    p.set_defaults(func=cmd_collatz_experiment)

    p = csub.add_parser("structure", help="inverse-path progression check")
    p.add_argument("--ktuple", required=True, help="e.g. 1,1")
    p.add_argument("--limit", type=int, required=True)
    _add_common(p)
    p.set_defaults(func=cmd_collatz_structure)

    p = csub.add_parser("kvalues", help="pooled multiplicity law")
    p.add_argument("--start", type=int, default=DEFAULT_CENSUS_START)
    p.add_argument("--count", type=int, default=DEFAULT_CENSUS_COUNT)
    p.add_argument("--iterations", "-m", type=int, default=DEFAULT_M)
    _add_common(p)
    p.set_defaults(func=cmd_collatz_kvalues)

    p = csub.add_parser("ratio", help="ratio statistic digit table + model KS")
    p.add_argument("--start", type=int, default=DEFAULT_CENSUS_START)
    p.add_argument("--count", type=int, default=DEFAULT_CENSUS_COUNT)
    p.add_argument("--iterations", "-m", type=int, default=DEFAULT_M)
    p.add_argument("--base", type=int, default=10)
    _add_common(p)
    p.set_defaults(func=cmd_collatz_ratio)

    p = csub.add_parser("model", help="geometric-sum model digit table")
    p.add_argument("--iterations", "-m", type=int, default=DEFAULT_M)
    p.add_argument("--samples", type=int, default=DEFAULT_CENSUS_COUNT)
    p.add_argument("--base", type=int, default=10)
    _add_common(p)
    p.set_defaults(func=cmd_collatz_model)

    p = sub.add_parser("zeta", help="|zeta| line scans and digit tables")
    p.add_argument("--preset", default=None,
                   help=f"one of {sorted(ZETA_PRESETS)}")
    p.add_argument("--t-start", type=float, default=0.0)
    p.add_argument("--t-end", type=float, default=100.0)
    p.add_argument("--step", type=float, default=0.25)
    p.add_argument("--sigma", type=float, default=0.5)
    p.add_argument("--near-critical-delta", type=float, default=None)
    p.add_argument("--base", type=int, default=10)
    _add_common(p)
    p.set_defaults(func=cmd_zeta)

    p = sub.add_parser("cue", help="Haar-unitary characteristic polynomials")
    p.add_argument("--dim", type=int, default=64)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--base", type=int, default=10)
    _add_common(p)
    p.set_defaults(func=cmd_cue)

    pe = sub.add_parser("equidist", help="equidistribution diagnostics")
    esub = pe.add_subparsers(dest="subcommand", required=True)

    p = esub.add_parser("kalpha", help="k*alpha mod 1 discrepancy report")
    p.add_argument("--alpha", required=True,
                   help="float, 'p/q', or 'log:X:B'")
    p.add_argument("--count", type=int, default=100_000)
    p.add_argument("--et-m", type=int, default=100)
    _add_common(p)
    p.set_defaults(func=cmd_equidist_kalpha)

    p = esub.add_parser("cf", help="certified continued-fraction convergents")
    p.add_argument("--alpha", required=True)
    p.add_argument("--depth", type=int, default=20)
    p.add_argument("--dps", type=int, default=500)
    _add_common(p)
    p.set_defaults(func=cmd_equidist_cf)

    p = esub.add_parser("type", help="irrationality-type probe")
    p.add_argument("--alpha", required=True)
    p.add_argument("--depth", type=int, default=30)
    p.add_argument("--gammas", default="0.5,0.75,0.9,0.95,1.0,1.25")
    p.add_argument("--dps", type=int, default=500)
    _add_common(p)
    p.set_defaults(func=cmd_equidist_type)

    p = sub.add_parser("poisson-check", help="theta identity residual sweep")
    p.add_argument("--sigmas", default="0.1,0.5,1,2,10,50")
    p.add_argument("--cutoff", type=int, default=None)
    _add_common(p)
    p.set_defaults(func=cmd_poisson_check)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    workers = args.workers
    if workers is None:
        workers = int(os.environ.get(WORKERS_ENV, "1"))
    if workers < 1:
        print("error: worker count must be >= 1", file=sys.stderr)
        return 2
    params = {k: v for k, v in vars(args).items()
              if k not in ("func", "seed", "workers", "out", "fmt")
              and v is not None}
    cfg = ExperimentConfig(
        command=params.pop("command"),
        params={k: (v if isinstance(v, (int, float, bool)) else str(v))
                for k, v in params.items()},
        rng_seed=args.seed, workers=workers, out=args.out, fmt=args.fmt)
    try:
        return args.func(args, cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CheckFailed as exc:
        print(f"assertion failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
