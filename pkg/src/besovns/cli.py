"""Command-line entry point.

Subcommands: converge, viscosity, stability, selftest.  Flags mirror a flat
key=value config file; explicit flags override file values.  Exit codes:
0 full success, 1 any failed cell (or failed suite), 2 configuration error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import ConfigurationError, DataError
from .experiments import (
    ExperimentSpec,
    convergence_sweep,
    emit_csv,
    stability_check,
    viscosity_sweep,
)
from .selftest import run_selftest

_FLAG_KEYS = {
    "nu": str,
    "tau": float,
    "halvings": int,
    "T": float,
    "grid": int,
    "trunc": int,
    "picard_tol": float,
    "picard_max": int,
    "out": str,
}

_DEFAULTS = {
    "converge": dict(nu="1,0.1,0.01,1e-5", tau=0.01, halvings=5, T=2.0),
    "viscosity": dict(nu="0.1", tau=1e-4, halvings=5, T=0.1),
    "stability": dict(nu="1,0.1,0.01,1e-5,0", tau=0.01, halvings=0, T=2.0),
    "selftest": dict(nu="1", tau=0.01, halvings=0, T=2.0),
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="besovns",
        description="Spectral Navier-Stokes experiments with Besov-norm error reporting",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("converge", "viscosity", "stability", "selftest"):
        p = sub.add_parser(name)
        p.add_argument("--nu", help="comma-separated viscosity list (base value for viscosity sweeps)")
        p.add_argument("--tau", type=float, help="base time step")
        p.add_argument("--halvings", type=int, help="number of halvings in the sweep")
        p.add_argument("--T", type=float, help="final time")
        p.add_argument("--grid", type=int, help="collocation points per dimension")
        p.add_argument("--trunc", type=int, help="Fourier truncation |k|_inf <= N")
        p.add_argument("--picard-tol", type=float, dest="picard_tol")
        p.add_argument("--picard-max", type=int, dest="picard_max")
        p.add_argument("--out", help="CSV output path")
        p.add_argument("--config", help="flat key=value file; flags override it")
    return parser


def _read_config(path: str) -> dict:
    text = Path(path).read_text()
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigurationError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip().replace("-", "_")  # picard-tol and picard_tol both work
        if key not in _FLAG_KEYS:
            raise ConfigurationError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            values[key] = _FLAG_KEYS[key](val.strip())
        except ValueError as exc:
            raise ConfigurationError(f"{path}:{lineno}: bad value for {key}: {exc}")
    return values


def _parse_nus(raw: str) -> tuple:
    try:
        return tuple(float(tok) for tok in raw.split(",") if tok.strip())
    except ValueError as exc:
        raise ConfigurationError(f"bad --nu list {raw!r}: {exc}")


def _assemble_spec(args) -> ExperimentSpec:
    merged = dict(_DEFAULTS[args.command])
    merged.setdefault("grid", 64)
    merged.setdefault("trunc", 21)
    merged.setdefault("picard_tol", 1e-12)
    merged.setdefault("picard_max", 100)
    merged.setdefault("out", None)
    if args.config:
        merged.update(_read_config(args.config))
    for key in _FLAG_KEYS:
        flag = getattr(args, key if key != "T" else "T", None)
        if flag is not None:
            merged[key] = flag
    return ExperimentSpec(
        kind=args.command,
        nu_list=_parse_nus(merged["nu"]) if isinstance(merged["nu"], str) else merged["nu"],
        tau_base=merged["tau"],
        halvings=merged["halvings"],
        T=merged["T"],
        n_points=merged["grid"],
        N=merged["trunc"],
        picard_tol=merged["picard_tol"],
        picard_max=merged["picard_max"],
        out_path=merged["out"],
    )


def _print_rows(rows) -> None:
    for r in rows:
        if r.note:
            print(f"  nu={r.nu:<10g} tau={r.tau:<12g} FAILED: {r.note}")
        else:
            print(
                f"  nu={r.nu:<10g} tau={r.tau:<12g} "
                f"L2={r.err_L2:.4e} B0inf1={r.err_B0inf1:.4e} "
                f"B0inf2={r.err_B0inf2:.4e} iters={r.picard_mean_iters:.1f} "
                f"[{r.wall_seconds:.1f}s]"
            )


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "selftest":
            ok = run_selftest()
            return 0 if ok else 1
        spec = _assemble_spec(args)
        if args.command == "converge":
            rows = convergence_sweep(spec)
        elif args.command == "viscosity":
            rows = viscosity_sweep(spec)
        else:
            report = stability_check(spec)
            rows = report.rows
            for e in report.entries:
                status = "ok" if e.within_bound else "VIOLATED"
                print(
                    f"  nu={e.nu:<10g} tau={e.tau:<12g} "
                    f"max ||u^n||/||u^0|| = {e.max_ratio:.12f}  bound(8x): {status}"
                )
        _print_rows(rows)
        if spec.out_path:
            emit_csv(rows, spec.out_path)
            print(f"wrote {spec.out_path}")
        return 1 if any(r.note for r in rows) else 0
    except (ConfigurationError, DataError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
