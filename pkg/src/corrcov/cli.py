"""Command-line interface.

Subcommands: pattern, bound, simulate (sample-size | convergence | complex),
verify, fit-constant. Exit codes: 0 success, 1 verification failure or
censored trials, 2 usage or parse error. Every CSV starts with a `# config:`
comment from which the run can be reproduced; numbers are printed with 12
significant digits. The CORRCOV_SEED environment variable overrides the
default seed; an explicit --seed flag wins over both.
"""

from __future__ import annotations

import argparse
import os
import sys
from itertools import product
from pathlib import Path

import numpy as np

from . import bounds, montecarlo, patterns, svgchart, verify
from ._rng import derive_seed
from .patterns import PatternSpecError
from .sampling import psi2_constant

DEFAULT_SEED = 0
SEED_ENV_VAR = "CORRCOV_SEED"

DEFAULT_REAL_PATTERNS = "identity,toeplitz:0.25,toeplitz:0.5"
DEFAULT_COMPLEX_PATTERNS = "identity,phase:0.25,phase:0.5"


def _num(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    z = complex(x)
    if z.imag != 0.0:
        return f"{z.real:.12g}{z.imag:+.12g}j"
    return format(z.real, ".12g")


def _resolve_seed(value: int | None) -> int:
    if value is not None:
        return value
    env = os.environ.get(SEED_ENV_VAR)
    if env is None:
        return DEFAULT_SEED
    try:
        return int(env)
    except ValueError:
        raise ValueError(f"{SEED_ENV_VAR} must be an integer, got {env!r}") from None


def _parse_int_range(text: str, name: str) -> tuple[int, ...]:
    """`start:stop:step` (stop inclusive when aligned), comma list, or single int."""
    body = text.strip()
    try:
        if ":" in body:
            parts = body.split(":")
            if len(parts) != 3:
                raise ValueError("expected start:stop:step")
            start, stop, step = (int(p) for p in parts)
            if step <= 0:
                raise ValueError("step must be positive")
            if stop < start:
                raise ValueError("stop must not precede start")
            return tuple(range(start, stop + 1, step))
        return tuple(int(p) for p in body.split(","))
    except ValueError as exc:
        raise ValueError(f"bad {name} range {text!r}: {exc}") from None


def _parse_single_int(text: str, name: str) -> int:
    values = _parse_int_range(text, name)
    if len(values) != 1:
        raise ValueError(f"{name} must be a single value, got {text!r}")
    return values[0]


def _parse_families(text: str) -> tuple[patterns.PatternFamily, ...]:
    specs = [s for s in text.split(",") if s.strip()]
    if not specs:
        raise ValueError("at least one pattern spec is required")
    return tuple(patterns.parse_pattern(s) for s in specs)


def _load_sigma(path: str) -> np.ndarray:
    try:
        sigma = np.loadtxt(path, delimiter=",", ndmin=2)
    except (OSError, ValueError) as exc:
        raise ValueError(f"cannot read sigma CSV {path!r}: {exc}") from None
    return sigma


def _instantiate(family: patterns.PatternFamily, m: int, seed: int):
    theta = None
    if family.kind == "phase":
        theta = patterns.draw_phases(m, derive_seed(seed, "theta"))
    return family.instantiate(m, theta)


def _emit_csv(path: str | None, config: str, header: str, rows) -> None:
    lines = [f"# config: {config}", header]
    lines.extend(",".join(r) for r in rows)
    text = "\n".join(lines) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _emit_svg(path: str, series, title: str, x_label: str, y_label: str) -> None:
    Path(path).write_text(svgchart.line_chart(series, title, x_label, y_label))


def _default_workers() -> int:
    return os.cpu_count() or 1


# -- pattern ---------------------------------------------------------------

def cmd_pattern(args) -> int:
    seed = _resolve_seed(args.seed)
    family = patterns.parse_pattern(args.spec)
    p = _instantiate(family, args.m, seed)
    norms = patterns.pattern_norms(p)
    entries = [
        ("pattern", family.label),
        ("m", _num(args.m)),
        ("trace", _num(norms.trace)),
        ("frobenius", _num(norms.frobenius)),
        ("spectral", _num(norms.spectral)),
    ]
    if family.kind in ("toeplitz", "phase"):
        w = family.omega if family.kind == "toeplitz" else family.c
        entries.append(
            ("frobenius_closed", _num(np.sqrt(patterns.toeplitz_frobenius_sq(w, args.m))))
        )
        entries.append(("spectral_bound", _num(patterns.toeplitz_spectral_bound(w))))
    width = max(len(k) for k, _ in entries)
    for key, value in entries:
        print(f"{key:<{width}}  {value}")
    if args.output:
        config = f"pattern {family.label} --m {args.m} --seed {seed}"
        rows = [(family.label, str(args.m), k, v) for k, v in entries[2:]]
        _emit_csv(args.output, config, "pattern,m,quantity,value", rows)
    return 0


# -- bound -----------------------------------------------------------------

def cmd_bound(args) -> int:
    seed = _resolve_seed(args.seed)
    if args.pattern is not None:
        if args.m is None:
            raise ValueError("--pattern requires --m")
        family = patterns.parse_pattern(args.pattern)
        p = _instantiate(family, args.m, seed)
        norms = patterns.pattern_norms(p)
        b_frobenius = norms.frobenius
        b_spectral = norms.spectral
        tr = complex(norms.trace)
        if abs(tr.imag) > 1e-9 * max(1.0, abs(tr)):
            raise ValueError("bias term needs a real trace; this pattern has a complex one")
        b_trace = tr.real
        b_label = family.label
    else:
        missing = [
            flag for flag, value in (
                ("--m", args.m),
                ("--b-frobenius", args.b_frobenius),
                ("--b-spectral", args.b_spectral),
                ("--b-trace", args.b_trace),
            ) if value is None
        ]
        if missing:
            raise ValueError(
                "without --pattern, " + ", ".join(missing) + " must be given"
            )
        b_frobenius, b_spectral, b_trace = args.b_frobenius, args.b_spectral, args.b_trace
        b_label = "explicit"
    K = args.K if args.K is not None else (
        psi2_constant(args.dist) if args.dist is not None else 1.0
    )
    q = bounds.BoundQuery(
        n=args.n,
        m=args.m,
        delta=args.delta,
        K=K,
        B_frobenius=b_frobenius,
        B_spectral=b_spectral,
        B_trace=b_trace,
        sigma_spectral=args.sigma_spectral,
        C=args.C,
    )
    form = "expectation" if args.expectation else "tail"
    bias = bounds.bias_term(q)
    concentration = bounds.concentration_tail_bound(q, form)
    total = bias + concentration
    if form == "expectation":
        confidence = "n/a (expectation form)"
    elif args.complex:
        confidence = f"1 - c*exp(-{_num(args.delta)}) with c unknown"
    else:
        confidence = _num(bounds.real_confidence(args.delta))
    entries = [
        ("pattern", b_label),
        ("n", _num(args.n)),
        ("m", _num(args.m)),
        ("delta", _num(args.delta)),
        ("K", _num(K)),
        ("C", _num(args.C)),
        ("B_frobenius", _num(b_frobenius)),
        ("B_spectral", _num(b_spectral)),
        ("B_trace", _num(b_trace)),
        ("sigma_spectral", _num(args.sigma_spectral)),
        ("form", form),
        ("bias", _num(bias)),
        ("concentration", _num(concentration)),
        ("total", _num(total)),
        ("confidence", confidence),
    ]
    width = max(len(k) for k, _ in entries)
    for key, value in entries:
        print(f"{key:<{width}}  {value}")
    return 0


# -- simulate ----------------------------------------------------------------

def _scan_rows(result) -> list[tuple[str, ...]]:
    return [
        (r.experiment, r.distribution, r.pattern, str(r.n), str(r.trials),
         _num(r.mean_min_m), _num(r.std_min_m), str(r.censored), str(r.seed))
        for r in result.rows
    ]


def _convergence_rows(result) -> list[tuple[str, ...]]:
    return [
        (r.experiment, r.distribution, r.pattern, str(r.n), str(r.m), str(r.trials),
         _num(r.mean_spec_err), _num(r.std_spec_err), str(r.seed))
        for r in result.rows
    ]


def _series_by_pattern(rows, x_attr: str, y_attr: str):
    order: list[str] = []
    data: dict[str, tuple[list, list]] = {}
    for r in rows:
        if r.pattern not in data:
            order.append(r.pattern)
            data[r.pattern] = ([], [])
        xs, ys = data[r.pattern]
        xs.append(getattr(r, x_attr))
        ys.append(getattr(r, y_attr))
    return [(label, *data[label]) for label in order]


def cmd_simulate(args) -> int:
    seed = _resolve_seed(args.seed)
    workers = args.workers if args.workers is not None else _default_workers()
    families = _parse_families(args.patterns)
    sigma = _load_sigma(args.sigma) if args.sigma else None
    m_cap = getattr(args, "m_cap", None)
    config_parts = [f"simulate {args.mode}", f"--dist {args.dist}",
                    f"--patterns {args.patterns}", f"--n {args.n}"]
    if args.mode == "convergence":
        spec = montecarlo.ExperimentSpec(
            kind="convergence",
            distribution=args.dist,
            patterns=families,
            m_values=_parse_int_range(args.m, "m"),
            n_fixed=_parse_single_int(args.n, "n"),
            trials=args.trials,
            base_seed=seed,
            sigma=sigma,
        )
        config_parts.append(f"--m {args.m}")
        result = montecarlo.run_convergence_experiment(spec, workers)
        header = "experiment,distribution,pattern,n,m,trials,mean_spec_err,std_spec_err,seed"
        rows = _convergence_rows(result)
        series = _series_by_pattern(result.rows, "m", "mean_spec_err")
        x_label, y_label = "m", "mean spectral error"
        title = f"Convergence at n={spec.n_fixed} ({args.dist})"
    else:
        spec = montecarlo.ExperimentSpec(
            kind=args.mode,
            distribution=args.dist,
            patterns=families,
            n_values=_parse_int_range(args.n, "n"),
            eta=args.eta,
            trials=args.trials,
            base_seed=seed,
            m_cap=m_cap,
            sigma=sigma,
        )
        config_parts.append(f"--eta {_num(args.eta)}")
        if args.mode == "complex":
            result = montecarlo.run_complex_experiment(spec, workers)
        else:
            result = montecarlo.run_sample_size_experiment(spec, workers)
        header = "experiment,distribution,pattern,n,trials,mean_min_m,std_min_m,censored,seed"
        rows = _scan_rows(result)
        series = _series_by_pattern(result.rows, "n", "mean_min_m")
        x_label, y_label = "n", "mean minimal m"
        title = f"Minimal sample size vs dimension ({args.dist}, eta={_num(spec.eta)})"
    config_parts.append(f"--trials {args.trials}")
    config_parts.append(f"--seed {seed}")
    if m_cap is not None and args.mode != "convergence":
        config_parts.append(f"--m-cap {m_cap}")
    if args.sigma:
        config_parts.append(f"--sigma {args.sigma}")
    config = " ".join(config_parts)
    _emit_csv(args.output, config, header, rows)
    if args.svg:
        _emit_svg(args.svg, series, title, x_label, y_label)
    if args.output:
        print(f"wrote {args.output} ({len(rows)} rows, censored={result.censored_total})")
    return 1 if result.censored_total > 0 else 0


# -- verify ------------------------------------------------------------------

def cmd_verify(args) -> int:
    seed = _resolve_seed(args.seed)
    only = [s.strip() for s in args.only.split(",")] if args.only else None
    reports = verify.run_battery(seed, args.instances, only)
    if args.pattern is not None:
        if args.m is None:
            raise ValueError("--pattern requires --m")
        family = patterns.parse_pattern(args.pattern)
        B = patterns.materialize(_instantiate(family, args.m, seed))
        label = family.label
        from .linalg_core import is_hermitian

        if is_hermitian(B):
            rep = verify.check_hermitian_split(B)
            reports.append(
                verify.IdentityReport(f"hermitian-split[{label}]", rep.max_deviation,
                                      rep.instances, rep.tolerance, rep.passed, rep.note)
            )
        rep = verify.check_complex_embedding(B, seed)
        reports.append(
            verify.IdentityReport(f"complex-embedding[{label}]", rep.max_deviation,
                                  rep.instances, rep.tolerance, rep.passed, rep.note)
        )
        if not np.iscomplexobj(B) and args.m <= 8:
            rep = verify.check_epsilon_net_bound(B, seed=seed)
            reports.append(
                verify.IdentityReport(f"epsilon-net[{label}]", rep.max_deviation,
                                      rep.instances, rep.tolerance, rep.passed, rep.note)
            )
    name_w = max(len(r.name) for r in reports)
    print(f"{'check':<{name_w}}  {'instances':>9}  {'max_deviation':>14}  "
          f"{'tolerance':>10}  result")
    for r in reports:
        line = (f"{r.name:<{name_w}}  {r.instances:>9}  {_num(r.max_deviation):>14}  "
                f"{_num(r.tolerance):>10}  {'pass' if r.passed else 'FAIL'}")
        if r.note:
            line += f"  ({r.note})"
        print(line)
    all_passed = all(r.passed for r in reports)
    if args.hanson_wright:
        B = patterns.materialize(patterns.toeplitz_pattern(0.5, 50))
        for dist in ("gaussian", "rademacher"):
            hw = verify.check_hanson_wright_empirical(dist, B, trials=args.hw_trials,
                                                      seed=seed)
            print(f"hanson-wright[{dist}]: slope={_num(hw.slope)} "
                  f"R2={_num(hw.r_squared)} trials={hw.trials} dropped={hw.dropped} "
                  f"{'pass' if hw.passed else 'FAIL'}")
            all_passed = all_passed and hw.passed
    if args.output:
        config = f"verify --seed {seed} --instances {args.instances}"
        if args.only:
            config += f" --only {args.only}"
        if args.pattern is not None:
            config += f" --pattern {args.pattern} --m {args.m}"
        rows = [
            (r.name, str(r.instances), _num(r.max_deviation), _num(r.tolerance),
             _num(r.passed), r.note)
            for r in reports
        ]
        _emit_csv(args.output, config,
                  "check,instances,max_deviation,tolerance,passed,note", rows)
    return 0 if all_passed else 1


# -- fit-constant ------------------------------------------------------------

def cmd_fit_constant(args) -> int:
    seed = _resolve_seed(args.seed)
    workers = args.workers if args.workers is not None else _default_workers()
    dists = [s.strip() for s in args.dist.split(",") if s.strip()]
    families = _parse_families(args.patterns)
    ns = _parse_int_range(args.n, "n")
    ms = _parse_int_range(args.m, "m")
    cells = [
        bounds.FitCell(n=n, m=m, family=family, distribution=dist)
        for dist, family, n, m in product(dists, families, ns, ms)
    ]
    result = bounds.fit_constant(cells, args.trials, seed, workers)
    header = ("distribution", "pattern", "n", "m", "mean_error", "rate", "ratio")
    widths = [max(len(h), 12) for h in header]
    print("  ".join(h.ljust(w) for h, w in zip(header, widths)))
    for cell in result.cells:
        row = (cell.distribution, cell.pattern, str(cell.n), str(cell.m),
               _num(cell.mean_error), _num(cell.rate), _num(cell.ratio))
        print("  ".join(v.ljust(w) for v, w in zip(row, widths)))
    print(f"fitted C: {_num(result.constant)}  (trials={result.trials}, seed={result.seed})")
    if args.output:
        config = (f"fit-constant --dist {args.dist} --patterns {args.patterns} "
                  f"--n {args.n} --m {args.m} --trials {args.trials} --seed {seed}")
        rows = [
            (c.distribution, c.pattern, str(c.n), str(c.m), str(result.trials),
             _num(c.mean_error), _num(c.rate), _num(c.ratio), _num(result.constant),
             str(seed))
            for c in result.cells
        ]
        _emit_csv(args.output, config,
                  "distribution,pattern,n,m,trials,mean_error,rate,ratio,fitted_C,seed",
                  rows)
    return 0


# -- parser ------------------------------------------------------------------

def _add_seed(parser) -> None:
    parser.add_argument("--seed", type=int, default=None,
                        help=f"base seed (default: ${SEED_ENV_VAR} or {DEFAULT_SEED})")


def _add_simulate_common(parser, default_patterns: str) -> None:
    parser.add_argument("--dist", default="gaussian",
                        help="distribution: gaussian | rademacher | uniform")
    parser.add_argument("--patterns", default=default_patterns,
                        help="comma-separated pattern specs")
    parser.add_argument("--trials", type=int, default=montecarlo.DEFAULT_TRIALS)
    parser.add_argument("--sigma", default=None,
                        help="CSV with a positive definite covariance (default: identity)")
    parser.add_argument("--workers", type=int, default=None,
                        help="parallel worker processes (default: available cores)")
    parser.add_argument("-o", "--output", default=None,
                        help="CSV output path (default: stdout)")
    parser.add_argument("--svg", default=None, help="also write an SVG line chart")
    _add_seed(parser)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="corrcov",
        description="Covariance estimation from correlated samples: patterns, "
                    "error bounds, Monte-Carlo experiments, identity checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pattern", help="print norms of a correlation pattern")
    p.add_argument("spec", help="identity | toeplitz:<omega> | phase:<c> | custom:<path.csv>")
    p.add_argument("--m", type=int, required=True, help="pattern size")
    p.add_argument("-o", "--output", default=None, help="CSV output path")
    _add_seed(p)
    p.set_defaults(func=cmd_pattern)

    p = sub.add_parser("bound", help="evaluate the estimation error bound")
    p.add_argument("--pattern", default=None, help="pattern spec supplying the B norms")
    p.add_argument("--m", type=int, default=None, help="sample count")
    p.add_argument("--n", type=int, required=True, help="dimension")
    p.add_argument("--delta", type=float, default=0.0, help="tail parameter")
    p.add_argument("--K", type=float, default=None,
                   help="psi2 constant (default: from --dist, else 1)")
    p.add_argument("--dist", default=None, help="distribution supplying K")
    p.add_argument("--C", type=float, default=1.0, help="absolute constant")
    p.add_argument("--sigma-spectral", type=float, default=1.0, help="spectral norm of sigma")
    p.add_argument("--expectation", action="store_true",
                   help="delta-free expectation form instead of the tail form")
    p.add_argument("--complex", action="store_true",
                   help="report the complex-case confidence (constant unknown)")
    p.add_argument("--b-frobenius", type=float, default=None)
    p.add_argument("--b-spectral", type=float, default=None)
    p.add_argument("--b-trace", type=float, default=None)
    _add_seed(p)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("simulate", help="run a Monte-Carlo experiment")
    modes = p.add_subparsers(dest="mode", required=True)

    q = modes.add_parser("sample-size", help="mean minimal sample size vs dimension")
    q.add_argument("--n", default="5:30:5", help="dimension range start:stop:step or list")
    q.add_argument("--eta", type=float, default=montecarlo.DEFAULT_ETA,
                   help="normalized Frobenius error tolerance")
    q.add_argument("--m-cap", type=int, default=None, help="censoring cap for the m scan")
    _add_simulate_common(q, DEFAULT_REAL_PATTERNS)
    q.set_defaults(func=cmd_simulate)

    q = modes.add_parser("convergence", help="mean spectral error vs sample count")
    q.add_argument("--n", default="30", help="fixed dimension")
    q.add_argument("--m", default="50:1000:50", help="sample count range")
    _add_simulate_common(q, DEFAULT_REAL_PATTERNS)
    q.set_defaults(func=cmd_simulate)

    q = modes.add_parser("complex", help="complex-field minimal sample size vs dimension")
    q.add_argument("--n", default="5:30:5", help="dimension range start:stop:step or list")
    q.add_argument("--eta", type=float, default=montecarlo.DEFAULT_ETA,
                   help="normalized Frobenius error tolerance")
    q.add_argument("--m-cap", type=int, default=None, help="censoring cap for the m scan")
    _add_simulate_common(q, DEFAULT_COMPLEX_PATTERNS)
    q.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="run the proof-identity battery")
    p.add_argument("--instances", type=int, default=200, help="random instances per check")
    p.add_argument("--only", default=None,
                   help=f"comma-separated subset of {', '.join(verify.BATTERY_CHECKS)}")
    p.add_argument("--pattern", default=None,
                   help="also check the identities on this pattern's matrix")
    p.add_argument("--m", type=int, default=None, help="size for --pattern")
    p.add_argument("--hanson-wright", action="store_true",
                   help="also run the empirical quadratic-form tail regression")
    p.add_argument("--hw-trials", type=int, default=100_000)
    p.add_argument("-o", "--output", default=None, help="CSV output path")
    _add_seed(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("fit-constant", help="fit the bound constant on a grid")
    p.add_argument("--dist", default="gaussian", help="comma-separated distributions")
    p.add_argument("--patterns", default="identity", help="comma-separated pattern specs")
    p.add_argument("--n", default="5,10,20", help="dimension list")
    p.add_argument("--m", default="100,400", help="sample count list")
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("-o", "--output", default=None, help="CSV output path")
    _add_seed(p)
    p.set_defaults(func=cmd_fit_constant)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (PatternSpecError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
