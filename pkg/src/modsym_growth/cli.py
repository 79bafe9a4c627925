"""Command line entry point ``modsym``.

Exit status is 0 on success, 1 for domain errors (non-members, bad input
files, bad arguments) and 2 for precision or resource limits. Every error
is reported on one stderr line starting with "error:".
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

from .arith import GroupElement
from .cusps import TruncationParams, choose_truncation, cusp_classes
from .errors import MembershipError, ParseError, PrecisionError, ResourceError
from .growth import (
    check_base_point,
    count_violations,
    explicit_constants,
    fit_log_bound,
    sample_elements,
    scan,
    verify_lemma2,
    write_csv,
)
from .reduction import reduce
from .symbols import (
    DEFAULT_ORDER,
    DEFAULT_TOL,
    build_symbol_map,
    builtin_level11,
    load_series,
    max_direct_denominator,
    modsym_direct,
    modsym_word,
)
from .tablecache import load_table
from .words import S_INDEX, decompose_psl2z

BUILTIN_PREFIX = "builtin:"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


@dataclass(frozen=True)
class RunConfig:
    level: int
    x: float = 0.0
    y: float = 2.0
    T: float | None = None
    coeffs: str = "builtin:11"
    order: int = DEFAULT_ORDER
    strategy: str = "random-word"
    size: int = 100
    bound: int = 20
    seed: int | None = 0
    tol: float = DEFAULT_TOL
    out: str | None = None

    def __post_init__(self):
        if self.level < 1:
            raise ValueError("level must be a positive integer")
        if not self.y > 0:
            raise ValueError("base point must have y > 0")
        if not 0 < self.tol < 1:
            raise ValueError("tolerance must lie in (0, 1)")
        if self.strategy == "random-word" and self.seed is None:
            raise ValueError("random sampling needs a seed")

    @property
    def z0(self) -> complex:
        return complex(self.x, self.y)


def read_config(path) -> dict[str, str]:
    """key = value lines; '#' starts a comment."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ParseError(f"{path}:{lineno}: expected 'key = value'")
        out[key.strip().replace("-", "_")] = value.strip()
    return out


def _series(spec: str, order: int):
    if spec.startswith(BUILTIN_PREFIX):
        which = spec[len(BUILTIN_PREFIX):]
        if which != "11":
            raise ParseError(f"unknown builtin series {spec!r}; only builtin:11 exists")
        return builtin_level11(order)
    return load_series(spec)


def _config(args) -> RunConfig:
    return RunConfig(
        level=args.level,
        x=args.x,
        y=args.y,
        T=args.T,
        coeffs=getattr(args, "coeffs", "builtin:11"),
        order=args.order,
        strategy=getattr(args, "strategy", "random-word"),
        size=getattr(args, "size", 100),
        bound=getattr(args, "max_len", 20),
        seed=getattr(args, "seed", 0),
        tol=args.tol,
        out=getattr(args, "out", None),
    )


def _truncation(cfg: RunConfig) -> TruncationParams:
    if cfg.T is None:
        return choose_truncation(cfg.level, cfg.z0)
    return TruncationParams(cfg.T, tuple(cusp_classes(cfg.level)), cfg.level)


def _fmt(x: float) -> str:
    return f"{x + 0.0:.12g}"


def _word_text(word) -> str:
    if not word:
        return "1"
    return " ".join("S" if j == S_INDEX else ("T" if e > 0 else "T^-1") for j, e in word)


def cmd_gens(args, out):
    table = load_table(args.level)
    print(f"index {table.index}", file=out)
    for i, ((c, d), r) in enumerate(zip(table.cosets, table.transversal)):
        print(f"coset {i} ({c}:{d}) {r}", file=out)
    print(f"generators {len(table.generators)}", file=out)
    for j, g in enumerate(table.generators):
        print(f"gen {j} {g} inverse {table.inverse_index[j]}", file=out)


def cmd_cusps(args, out):
    for cls in cusp_classes(args.level):
        print(f"{cls.rep} width {cls.width}", file=out)


def cmd_decompose(args, out):
    g = GroupElement(*args.matrix)
    print(_word_text(decompose_psl2z(g)), file=out)


def cmd_symbol(args, out):
    cfg = _config(args)
    series = _series(cfg.coeffs, cfg.order)
    if cfg.level % series.level:
        raise MembershipError(f"a level {series.level} form does not live on Gamma0({cfg.level})")
    g = GroupElement(*args.matrix)
    if g.c % cfg.level:
        raise MembershipError(f"{g} is not in Gamma0({cfg.level})")
    if g.c <= max_direct_denominator(series, cfg.tol):
        psi = modsym_direct(g, series, cfg.tol)
    else:
        smap = build_symbol_map(load_table(cfg.level), series, cfg.tol)
        psi = modsym_word(g, smap)
    print(f"{_fmt(psi.real)} {_fmt(psi.imag)} {_fmt(abs(psi))}", file=out)


def cmd_reduce(args, out):
    cfg = _config(args)
    check_base_point(cfg.level, cfg.z0)
    g = GroupElement(*args.matrix)
    result = reduce(g, _truncation(cfg), cfg.z0)
    print(f"gamma_s {result.gamma_s}", file=out)
    print(f"parabolics {result.steps}", file=out)
    print(f"dist_before {_fmt(result.initial_distance)}", file=out)
    print(f"dist_after {_fmt(result.final_distance)}", file=out)


def _prepare(cfg: RunConfig):
    check_base_point(cfg.level, cfg.z0)
    series = _series(cfg.coeffs, cfg.order)
    table = load_table(cfg.level)
    smap = build_symbol_map(table, series, cfg.tol)
    return table, smap, _truncation(cfg)


def cmd_scan(args, out):
    cfg = _config(args)
    table, smap, trunc = _prepare(cfg)
    sample = sample_elements(table, cfg.strategy, cfg.size, cfg.bound, cfg.seed)
    records = scan(sample, smap, trunc, cfg.z0)
    if cfg.out:
        write_csv(records, cfg.out)
    else:
        write_csv(records, out)
    fit = fit_log_bound(records)
    failed = sum(1 for r in records if r.error)
    print(
        f"records {len(records)} A {_fmt(fit.A)} B {_fmt(fit.B)} "
        f"violations {count_violations(records, fit)} reduction_failures {failed}",
        file=sys.stderr if not cfg.out else out,
    )


def cmd_constants(args, out):
    cfg = _config(args)
    table, smap, trunc = _prepare(cfg)
    consts = explicit_constants(table, trunc, cfg.z0, smap)
    print(f"T {_fmt(trunc.T)}", file=out)
    print(f"R {_fmt(consts.R)} (estimate from {consts.boundary_samples} boundary rays)", file=out)
    print(f"S {len(consts.ball_gens)}", file=out)
    print(f"r_lower {_fmt(consts.r_lower)}", file=out)
    print(f"C_S {_fmt(consts.C_S)}", file=out)
    print(f"slope {_fmt(consts.slope())}", file=out)
    print(f"intercept {_fmt(consts.intercept())}", file=out)
    if args.size:
        sample = sample_elements(table, cfg.strategy, cfg.size, cfg.bound, cfg.seed)
        report = verify_lemma2(scan(sample, smap, trunc, cfg.z0), consts)
        print(f"bound records {report.records} violations {report.violations} "
              f"min_slack {_fmt(report.min_slack)}", file=out)


def _common(p, coeffs=False, base=False):
    p.add_argument("level", type=int, help="level N of Gamma0(N)")
    p.add_argument("--config", help="key = value file with default flag values")
    if coeffs:
        p.add_argument("--coeffs", default="builtin:11", help="coefficient file or builtin:11")
        p.add_argument("--order", type=int, default=DEFAULT_ORDER, help="coefficients for builtin series")
        p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    if base:
        p.add_argument("--x", type=float, default=0.0, help="base point real part")
        p.add_argument("--y", type=float, default=2.0, help="base point imaginary part")
        p.add_argument("--T", type=float, default=None, help="truncation height override")


def _matrix(p):
    p.add_argument("matrix", type=int, nargs=4, metavar=("a", "b", "c", "d"))


def _sampling(p, size, bound):
    p.add_argument("--strategy", choices=("random-word", "norm-ball"), default="random-word")
    p.add_argument("--size", type=int, default=size)
    p.add_argument("--max-len", type=int, default=bound, help="max word length, or norm bound")
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="modsym", description="Growth experiments for modular symbols on Gamma0(N).")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gens", help="cosets and Schreier generators")
    _common(p)
    p.set_defaults(func=cmd_gens)

    p = sub.add_parser("cusps", help="cusp class representatives and widths")
    _common(p)
    p.set_defaults(func=cmd_cusps)

    p = sub.add_parser("decompose", help="S/T word of a matrix")
    p.add_argument("--config", help=argparse.SUPPRESS)
    _matrix(p)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("symbol", help="modular symbol of one element")
    _common(p, coeffs=True)
    _matrix(p)
    p.set_defaults(func=cmd_symbol, x=0.0, y=2.0, T=None)

    p = sub.add_parser("reduce", help="parabolic reduction of one element")
    _common(p, base=True)
    _matrix(p)
    p.set_defaults(func=cmd_reduce, tol=DEFAULT_TOL, order=DEFAULT_ORDER)

    p = sub.add_parser("scan", help="CSV of |psi| against log norm")
    _common(p, coeffs=True, base=True)
    _sampling(p, 100, 20)
    p.add_argument("--out", help="CSV path (default stdout)")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("constants", help="explicit constants R, S, r, C_S of the word-length bound")
    _common(p, coeffs=True, base=True)
    _sampling(p, 0, 30)
    p.set_defaults(func=cmd_constants)
    return parser


def _apply_config(parser, argv):
    """Parse argv with defaults taken from --config, flags still winning."""
    args = parser.parse_args(argv)
    if getattr(args, "config", None):
        values = read_config(args.config)
        sub = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest for a in sub._actions}
        unknown = sorted(set(values) - known)
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(unknown)}")
        sub.set_defaults(**values)
        args = parser.parse_args(argv)
    return args


def run(argv=None, out=None) -> int:
    out = out if out is not None else sys.stdout
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
        args.func(args, out)
    except (UsageError, MembershipError, ParseError, ValueError, OSError) as exc:
        print(f"error: {_one_line(exc)}", file=sys.stderr)
        return 1
    except (PrecisionError, ResourceError, ArithmeticError) as exc:
        print(f"error: {_one_line(exc)}", file=sys.stderr)
        return 2
    return 0


def _one_line(exc) -> str:
    return " ".join(str(exc).split()) or type(exc).__name__


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
