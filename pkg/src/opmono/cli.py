"""Command-line front end.

Exit codes: 0 all checks pass, 2 a violation (or a failed check) was found,
3 invalid input.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .errors import OpMonoError
from .linalg import sample_commuting_tuple
from .monotonicity import (
    FunctionUnderTest,
    TrialConfig,
    bilinear,
    derive_seed,
    pick_check,
    polyproduct,
    power,
    qalpha,
    rminus,
    run_trials,
)
from .representation import verify_lemma1
from .stieltjes import (
    AtomicMeasure,
    QAlphaFunction,
    RMinusFunction,
    function_from_dict,
    load_function,
    q_alpha_eval,
    r_minus_eval,
)

EXIT_OK = 0
EXIT_VIOLATION = 2
EXIT_INVALID = 3

FUNCTIONS = ("power", "qalpha", "rminus", "bilinear", "polyproduct")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _add_function_args(p: argparse.ArgumentParser):
    g = p.add_argument_group("function")
    g.add_argument("--function", choices=FUNCTIONS, help="registry name")
    g.add_argument("--file", type=Path, help="JSON definition (kind qalpha or rminus)")
    g.add_argument("--n", type=int, default=None, help="arity")
    g.add_argument("--alpha", type=float, default=None)
    g.add_argument("--lambda", dest="lambda_", type=float, default=None)
    g.add_argument("--gamma", type=float, default=0.0)
    g.add_argument("--atoms", default=None, help='JSON atom list, e.g. \'[{"xi": [0, 0], "w": 1}]\'')
    g.add_argument("--coeffs", type=float, nargs="+", help="polyproduct coefficients c_j")
    g.add_argument("--alphas", type=float, nargs="+", help="polyproduct exponents alpha_j")


def _add_output(p: argparse.ArgumentParser):
    p.add_argument("--output", type=Path, default=Path("report.json"), help="JSON report path (default: %(default)s)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="opmono", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", help="randomized monotonicity trials")
    _add_function_args(v)
    v.add_argument("--regime", choices=("cross", "tuple"), default="tuple")
    v.add_argument("--trials", type=int, default=1000)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--d", type=int, nargs="+", default=[2, 3, 4, 5], help="matrix dimensions, cycled over trials")
    v.add_argument("--box", type=float, nargs=2, default=None, metavar=("LO", "HI"))
    v.add_argument("--gap-box", type=float, nargs=2, default=[0.0, 1.0], metavar=("LO", "HI"))
    v.add_argument("--eps", type=float, default=1e-9, help="pass tolerance on the scaled margin")
    v.add_argument("--floor", type=float, default=1e-6, help="violation floor on the scaled margin")
    _add_output(v)

    lm = sub.add_parser("lemma1", help="check the inverse representation of a Q^alpha function")
    _add_function_args(lm)
    lm.add_argument("--samples", type=int, default=20)
    lm.add_argument("--seed", type=int, default=0)
    lm.add_argument("--d", type=int, nargs="+", default=[1, 2, 3, 4, 5, 6])
    lm.add_argument("--box", type=float, nargs=2, default=[0.1, 10.0], metavar=("LO", "HI"))
    lm.add_argument("--route", choices=("eigen", "integral", "both"), default="both")
    lm.add_argument("--nodes", type=int, default=400)
    lm.add_argument("--tol-eigen", type=float, default=1e-8)
    lm.add_argument("--tol-integral", type=float, default=1e-6)
    _add_output(lm)

    ev = sub.add_parser("eval", help="evaluate S^alpha tau, f or psi at points")
    _add_function_args(ev)
    ev.add_argument("--point", action="append", required=True, help="comma-separated coordinates; use --point=-1,-2 for negatives")
    _add_output(ev)

    pk = sub.add_parser("pick", help="sample the upper half-plane image condition")
    _add_function_args(pk)
    pk.add_argument("--samples", type=int, default=1000)
    pk.add_argument("--seed", type=int, default=0)
    _add_output(pk)
    return parser


def _measure(args, n: int) -> AtomicMeasure:
    if args.atoms is None:
        return AtomicMeasure.dirac(np.zeros(n))
    try:
        atoms = json.loads(args.atoms)
    except json.JSONDecodeError as exc:
        raise UsageError(f"--atoms is not valid JSON: {exc}") from exc
    kind = {"kind": "qalpha", "n": n, "alpha": 1.0, "gamma": 0.0, "atoms": atoms}
    return function_from_dict(kind).measure


def resolve_function(args) -> FunctionUnderTest:
    """Build the function under test from parsed arguments."""
    if args.file is not None:
        if args.function not in (None, "qalpha", "rminus"):
            raise UsageError("--file defines a qalpha or rminus function")
        F = load_function(args.file)
        return qalpha(F) if isinstance(F, QAlphaFunction) else rminus(F)
    name = args.function
    if name is None:
        raise UsageError("one of --function or --file is required")
    if args.n is not None and args.n < 1:
        raise UsageError("--n must be a positive integer")
    if name == "power":
        if args.alpha is None or args.alpha < 0:
            raise UsageError("power needs --alpha >= 0")
        return power(args.n or 2, args.alpha)
    if name == "qalpha":
        alpha = 1.0 if args.alpha is None else args.alpha
        if alpha < 0:
            raise UsageError("qalpha needs --alpha >= 0")
        n = args.n or 2
        return qalpha(QAlphaFunction(alpha, args.gamma, _measure(args, n)))
    if name == "rminus":
        if args.lambda_ is None or args.lambda_ <= 0:
            raise UsageError("rminus needs --lambda > 0")
        if args.gamma < 0:
            raise UsageError("rminus needs --gamma >= 0")
        n = args.n or 2
        return rminus(RMinusFunction(args.lambda_, args.gamma, _measure(args, n)))
    if name == "bilinear":
        lam = 1.0 if args.lambda_ is None else args.lambda_
        if lam <= 0:
            raise UsageError("bilinear needs --lambda > 0")
        return bilinear(lam)
    if not args.coeffs or not args.alphas:
        raise UsageError("polyproduct needs --coeffs and --alphas")
    return polyproduct(args.coeffs, args.alphas)


def _write_report(path: Path, report: dict):
    text = json.dumps(report, indent=2) + "\n"
    if str(path) == "-":
        sys.stdout.write(text)
    else:
        path.write_text(text)


def _fmt(x) -> str:
    return "-" if x is None else f"{x:.3e}"


def cmd_verify(args) -> int:
    f = resolve_function(args)
    if args.trials < 0:
        raise UsageError("--trials must be >= 0")
    if args.seed < 0:
        raise UsageError("--seed must be >= 0")
    if min(args.d) < 1:
        raise UsageError("--d values must be positive")
    cfg = TrialConfig(
        dims=tuple(args.d),
        box=None if args.box is None else tuple(args.box),
        gap_box=tuple(args.gap_box),
        seed=args.seed,
        eps=args.eps,
        floor=args.floor,
    )
    report = run_trials(f, args.regime, args.trials, cfg)
    print(f"{'function':<12}{'regime':<8}{'trials':>8}{'violations':>12}{'inconclusive':>14}{'worst margin':>14}")
    print(
        f"{report.function:<12}{report.regime:<8}{report.trials:>8}{report.violations:>12}"
        f"{report.inconclusive:>14}{_fmt(report.worst_margin):>14}"
    )
    if report.witness is not None:
        w = report.witness
        print(f"witness: trial {w.index}, seed {w.seed}, d={w.d}, margin {w.margin:.6e}")
    _write_report(args.output, report.to_dict())
    return EXIT_OK if report.passed else EXIT_VIOLATION


def cmd_lemma1(args) -> int:
    if args.function is None and args.file is None:
        args.function = "power"
        args.alpha = 0.5 if args.alpha is None else args.alpha
    f = resolve_function(args)
    if not isinstance(f.source, QAlphaFunction):
        raise UsageError(f"lemma1 needs a qalpha-representable function, got {f.name}")
    if args.samples < 0 or args.seed < 0 or min(args.d) < 1 or args.nodes < 2:
        raise UsageError("--samples, --seed must be >= 0; --d >= 1; --nodes >= 2")
    if not 0 < args.box[0] < args.box[1]:
        raise UsageError("--box must lie in (0, inf)")
    F = f.source
    routes = ("eigen", "integral") if args.route == "both" else (args.route,)
    tols = {"eigen": args.tol_eigen, "integral": args.tol_integral}
    rows = []
    ok = True
    print(f"{'sample':>6}{'d':>4}" + "".join(f"{r + ' residual':>20}" for r in routes))
    for i in range(args.samples):
        d = args.d[i % len(args.d)]
        T = sample_commuting_tuple(F.n, d, tuple(args.box), derive_seed(args.seed, i))
        res = {r: verify_lemma1(T, F, r, args.nodes) for r in routes}
        ok &= all(res[r] <= tols[r] for r in routes)
        rows.append({"sample": i, "d": d, **{r: res[r] for r in routes}})
        print(f"{i:>6}{d:>4}" + "".join(f"{res[r]:>20.3e}" for r in routes))
    worst = {r: max((row[r] for row in rows), default=0.0) for r in routes}
    print("worst: " + ", ".join(f"{r} {worst[r]:.3e} (tol {tols[r]:.1e})" for r in routes))
    report = {
        "command": "lemma1",
        "function": {"name": f.name, **f.params},
        "config": {
            "samples": args.samples,
            "seed": args.seed,
            "dims": list(args.d),
            "box": list(args.box),
            "routes": list(routes),
            "nodes": args.nodes,
            "tolerances": {r: tols[r] for r in routes},
        },
        "residuals": rows,
        "worst": worst,
        "passed": bool(ok),
    }
    _write_report(args.output, report)
    return EXIT_OK if ok else EXIT_VIOLATION


def _parse_point(text: str, n: int) -> np.ndarray:
    try:
        x = np.array([float(v) for v in text.split(",")], dtype=np.float64)
    except ValueError as exc:
        raise UsageError(f"cannot parse point {text!r}") from exc
    if len(x) != n:
        raise UsageError(f"point {text!r} has {len(x)} coordinates, expected {n}")
    return x


def cmd_eval(args) -> int:
    f = resolve_function(args)
    points = [_parse_point(p, f.arity) for p in args.point]
    src = f.source
    rows = []
    for x in points:
        if isinstance(src, QAlphaFunction):
            transform = src.transform(x)
            value = q_alpha_eval(src, x)
        elif isinstance(src, RMinusFunction):
            transform = src.transform(-x)
            value = r_minus_eval(src, x)
            if f.name == "bilinear":
                value = f(x)
        else:
            transform = None
            value = f(x)
        rows.append({"point": x.tolist(), "transform": transform, "value": value})
    print(f"{'point':<24}{'transform':>22}{'value':>22}")
    for row in rows:
        label = "(" + ", ".join(repr(v) for v in row["point"]) + ")"
        transform = row["transform"]
        print(f"{label:<24}{'-' if transform is None else repr(transform):>22}{repr(row['value']):>22}")
    report = {"command": "eval", "function": {"name": f.name, **f.params}, "values": rows}
    _write_report(args.output, report)
    return EXIT_OK


def cmd_pick(args) -> int:
    f = resolve_function(args)
    if args.samples < 0 or args.seed < 0:
        raise UsageError("--samples and --seed must be >= 0")
    found = pick_check(f, args.samples, args.seed)
    worst = min(found, key=lambda v: v.imag) if found else None
    print(f"{'function':<12}{'points':>8}{'violations':>12}{'min Im f(z)':>14}")
    print(f"{f.name:<12}{args.samples + 1:>8}{len(found):>12}{_fmt(worst.imag if worst else None):>14}")
    if worst is not None:
        z = ", ".join(f"{c.real:.6g}{c.imag:+.6g}i" for c in worst.z)
        print(f"worst point: z = ({z}), Im f(z) = {worst.imag:.6e}")
    report = {
        "command": "pick",
        "function": {"name": f.name, **f.params},
        "config": {"samples": args.samples, "seed": args.seed},
        "violations": len(found),
        "worst": None if worst is None else worst.to_dict(),
    }
    _write_report(args.output, report)
    return EXIT_VIOLATION if found else EXIT_OK


COMMANDS = {"verify": cmd_verify, "lemma1": cmd_lemma1, "eval": cmd_eval, "pick": cmd_pick}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_INVALID
    try:
        return COMMANDS[args.command](args)
    except (UsageError, OpMonoError, ValueError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
