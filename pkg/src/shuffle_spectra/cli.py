"""Command-line front end: plot-ready CSV artifacts plus JSON run manifests.

Commands: spectrum, verify, l2curve, tvexact, bounds, simulate.  Every
output file is paired with a manifest recording the parsed flags verbatim,
the tool version, timing and a sha256 digest of each artifact.  Outputs are
byte-identical across reruns with identical flags.

Exit codes: 0 success, 1 usage/domain error, 2 resource guard,
3 numeric non-convergence.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from . import chain as chain_mod
from . import mixing, montecarlo
from .errors import DomainError, NumericError, ResourceLimitError
from .scalars import format_scalar
from .spectrum import (
    default_exact,
    first_row_hook_eig,
    resolve_workers,
    spectrum_table,
)

_PARALLEL_MIN_N = 11  # below this the process-pool overhead dominates


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _resolve_exact(mode: str, n: int, k: int) -> bool:
    if mode == "exact":
        return True
    if mode == "float":
        return False
    return default_exact(n, k)


def _write_csv(path: Path, header: list[str], rows: list[list[str]]) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(row) for row in rows)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _digest(path: Path) -> str:
    return "sha256:" + hashlib.sha256(path.read_bytes()).hexdigest()


def _write_manifest(out_dir: Path, command: str, params: dict, started: str,
                    wall: float, outputs: list[Path], extra: dict | None = None) -> Path:
    manifest = {
        "command": command,
        "parameters": params,
        "tool_version": __version__,
        "start_timestamp": started,
        "wall_clock_seconds": wall,
        "outputs": {p.name: _digest(p) for p in outputs},
    }
    if extra:
        manifest.update(extra)
    path = out_dir / f"{command}.manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n",
                    encoding="utf-8")
    return path


def _params(args: argparse.Namespace) -> dict:
    return {k: v for k, v in vars(args).items() if k != "func"}


def _workers_for(n: int) -> int:
    workers = resolve_workers()
    return workers if n >= _PARALLEL_MIN_N else 1


# -- commands -------------------------------------------------------------------


def cmd_spectrum(args) -> list[Path]:
    exact = _resolve_exact(args.mode, args.n, args.k)
    table = spectrum_table(args.n, args.k, exact=exact,
                           cache_enabled=not args.no_nu_cache,
                           workers=1 if args.no_nu_cache else _workers_for(args.n))
    rows = []
    for entry in table:
        shape_label = "-".join(str(p) for p in entry.shape.parts)
        for idx, record in enumerate(entry.records):
            rows.append([
                shape_label,
                str(idx),
                format_scalar(record.eigenvalue),
                str(entry.dim),
                format_scalar(record.f0),
                format_scalar(record.f_plus),
            ])
    out = Path(args.out) / "spectrum.csv"
    _write_csv(out, ["shape", "tableau_index", "eigenvalue", "multiplicity", "f0", "f_plus"], rows)
    return [out]


def cmd_verify(args) -> list[Path]:
    comparison = chain_mod.compare_spectra(args.n, args.k, tol=args.tol)
    corollary_bound = 1.0 - 1.0 / (args.n + 1)
    if args.n >= 2:
        eig_tn = float(first_row_hook_eig(args.n, args.n, args.k, exact=False))
    else:
        eig_tn = 1.0
    payload = {
        "n": args.n,
        "k": args.k,
        "tol": args.tol,
        "matched": comparison.matched,
        "mismatches": [
            {"formula": f, "oracle": o, "gap": g}
            for f, o, g in comparison.mismatches
        ],
        "max_abs_eig_formula": comparison.max_abs_eig_formula,
        "max_abs_eig_oracle": comparison.max_abs_eig_oracle,
        # the literal corollary claim eig(T_n) > 1 - 1/(n+1) is surfaced
        # here; the closed form shows it cannot hold
        "corollary_large_eig": {
            "claimed_lower_bound": corollary_bound,
            "eig_t_n": eig_tn,
            "claim_holds": bool(eig_tn > corollary_bound),
        },
    }
    out = Path(args.out) / "verify.json"
    out.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n",
                   encoding="utf-8")
    return [out]


def cmd_l2curve(args) -> list[Path]:
    if args.t_max < args.t_min:
        raise DomainError("--t-max must be >= --t-min")
    if args.t_step < 1:
        raise DomainError("--t-step must be >= 1")
    grid = list(range(args.t_min, args.t_max + 1, args.t_step))
    exact = _resolve_exact(args.mode, args.n, args.k)
    # the full-tableau column needs every SYT; beyond its guard the command
    # still serves the closed-form bounded curve when one was requested
    upper = None
    if args.n <= mixing.UPPER_CURVE_GUARD:
        upper = mixing.l2_upper_sq(args.n, args.k, grid, exact=exact,
                                   workers=_workers_for(args.n))
    elif args.trunc_m is None:
        raise ResourceLimitError(
            f"l2_upper_sq requires n <= {mixing.UPPER_CURVE_GUARD}; pass --trunc-m "
            f"to emit the closed-form bounded curve instead"
        )
    lower = mixing.l2_lower_sq(args.n, args.k, grid, exact=exact)
    header = ["t"]
    if upper:
        header.append("l2_upper_sq")
    header.append("l2_lower_sq")
    bounded = None
    if args.trunc_m is not None:
        bounded = mixing.l2_upper_sq_bounded(args.n, args.k, grid,
                                             args.trunc_m, args.constant_c)
        header.append("l2_upper_sq_bounded")
    upper_map = upper.channel("l2_upper_sq") if upper else {}
    lower_map = lower.channel("l2_lower_sq")
    bounded_map = bounded.channel("l2_upper_sq_bounded") if bounded else {}
    rows = []
    for t in grid:
        row = [str(t)]
        if upper:
            row.append(format_scalar(upper_map[t]))
        row.append(format_scalar(lower_map[t]))
        if bounded:
            row.append(format_scalar(bounded_map[t]))
        rows.append(row)
    out = Path(args.out) / "l2curve.csv"
    _write_csv(out, header, rows)
    extra = {"curve_meta": {"max_abs_eig_lower": lower.meta["max_abs_eig"]}}
    if upper:
        extra["curve_meta"]["max_abs_eig_upper"] = upper.meta["max_abs_eig"]
    if bounded:
        extra["curve_meta"]["strata"] = bounded.meta["strata"]
    args._manifest_extra = extra
    return [out]


def cmd_tvexact(args) -> list[Path]:
    if args.t_max < 0:
        raise DomainError("--t-max must be >= 0")
    exact = None if args.mode == "auto" else (args.mode == "exact")
    curve = chain_mod.exact_distances(args.n, args.k, args.t_max, exact=exact)
    tv = curve.channel("tv_exact")
    l2 = curve.channel("l2_exact")
    rows = [
        [str(t), format_scalar(tv[t]), format_scalar(l2[t])]
        for t in range(args.t_max + 1)
    ]
    out = Path(args.out) / "tvexact.csv"
    _write_csv(out, ["t", "tv", "l2_sq"], rows)
    return [out]


def cmd_bounds(args) -> list[Path]:
    ts = mixing.thresholds(args.n, args.k, args.gamma, args.c, args.d)
    asymptotic = (
        mixing.tv_lower_asymptotic(args.c) if args.c > 4.0 else math.nan
    )
    header = [
        "general_upper", "gamma_upper", "l2_lower_general",
        "l2_lower_gamma", "tv_lower", "large_k_order", "tv_lower_asymptotic",
    ]
    row = [
        format_scalar(ts.general_upper),
        format_scalar(ts.gamma_upper),
        format_scalar(ts.l2_lower_general),
        format_scalar(ts.l2_lower_gamma),
        format_scalar(ts.tv_lower),
        format_scalar(ts.large_k_order),
        format_scalar(asymptotic),
    ]
    out = Path(args.out) / "bounds.csv"
    _write_csv(out, header, [row])
    return [out]


def cmd_simulate(args) -> list[Path]:
    cfg = montecarlo.SimConfig(n=args.n, k=args.k, t=args.t, trials=args.trials,
                               seed=args.seed, statistic=args.statistic)
    survivor = montecarlo.untouched_statistic(cfg)
    exact_ubn = montecarlo.u_bn(cfg.n, montecarlo.top_set_size(cfg.n, cfg.k))
    tv_lower = survivor.estimate - float(exact_ubn)
    rows = [[
        str(args.t),
        format_scalar(survivor.estimate),
        format_scalar(survivor.stderr),
        format_scalar(float(exact_ubn)),
        format_scalar(tv_lower),
    ]]
    out = Path(args.out) / "simulate.csv"
    _write_csv(out, ["t", "estimate", "stderr", "exact_ubn", "tv_lower"], rows)
    return [out]


# -- wiring ---------------------------------------------------------------------


def build_parser() -> _Parser:
    parser = _Parser(prog="shuffle-spectra",
                     description="Spectrum and mixing diagnostics for the "
                                 "one-sided k-transposition shuffle.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, mode=False):
        p.add_argument("--n", type=int, required=True)
        p.add_argument("--k", type=int, required=True)
        p.add_argument("--out", default="./out", help="output directory")
        if mode:
            p.add_argument("--mode", choices=["auto", "exact", "float"], default="auto")

    p = sub.add_parser("spectrum", help="per-tableau eigenvalues and F0/F+ split")
    common(p, mode=True)
    p.add_argument("--no-nu-cache", action="store_true",
                   help="disable the nu memo table (identical output, slower)")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("verify", help="formula vs brute-force oracle spectrum")
    common(p)
    p.add_argument("--tol", type=float, default=1e-8)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("l2curve", help="squared-l2 upper/lower bound curves")
    common(p, mode=True)
    p.add_argument("--t-min", type=int, default=0)
    p.add_argument("--t-max", type=int, required=True)
    p.add_argument("--t-step", type=int, default=1)
    p.add_argument("--trunc-m", type=int, default=None,
                   help="emit the closed-form bounded curve truncated at this stratum")
    p.add_argument("--constant-c", type=float, default=0.0,
                   help="stand-in for the O(1/n^2) constant in the per-stratum bound")
    p.set_defaults(func=cmd_l2curve)

    p = sub.add_parser("tvexact", help="exact TV and l2 distance at small n")
    common(p, mode=True)
    p.add_argument("--t-max", type=int, required=True)
    p.set_defaults(func=cmd_tvexact)

    p = sub.add_parser("bounds", help="theorem threshold times")
    common(p)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--d", type=float, default=1.0)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("simulate", help="seeded coupon-collector statistic")
    common(p)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--statistic", choices=["untouched", "tvlower"], default="untouched")
    p.set_defaults(func=cmd_simulate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    started = datetime.now(timezone.utc).isoformat()
    clock = time.monotonic()
    try:
        outputs = args.func(args)
    except DomainError as exc:
        print(f"shuffle-spectra: {exc}", file=sys.stderr)
        return 1
    except ResourceLimitError as exc:
        print(f"shuffle-spectra: resource guard: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"shuffle-spectra: numeric failure: {exc}", file=sys.stderr)
        return 3
    wall = time.monotonic() - clock
    params = _params(args)
    extra = params.pop("_manifest_extra", None)
    _write_manifest(out_dir, args.command, params, started, wall, outputs, extra)
    return 0


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
