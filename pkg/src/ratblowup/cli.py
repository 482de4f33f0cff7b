"""Command-line front end: ``ratblowup <command> ...``.

Exit codes: 0 ok, 1 a check failed, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import checks, fixtures
from . import lagrangian as lg
from .gamma import gamma_all
from .kirby import parse_script, run_script
from .links import LinkError, MalformedCFError, ParseError, cf_value, neg_cf_expand
from .spin import characteristic_sublinks

SCHEMA = 1
TOLERANCES = {
    "lagrangian": 1e-9,
    "flow": 1e-6,
    "cover": 1e-6,
    "legendrian": 1e-12,
    "stereo": 1e-10,
}


class UsageError(Exception):
    pass


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        payload = {"schema": SCHEMA, "command": args.command, **payload}
        print(json.dumps(payload, sort_keys=True, ensure_ascii=False))
    else:
        print(text)


def _load_link(args):
    """Fixture from --space/--n, or a link file from --file."""
    if getattr(args, "file", None):
        with open(args.file, encoding="utf-8") as fh:
            return fixtures.interpret(args.file, 0, fh.read())
    if args.space is None or args.n is None:
        raise UsageError("give --space and --n, or --file")
    return fixtures.space_fixture(args.space, args.n)


def cmd_gamma(args) -> int:
    fx = fixtures.space_fixture(args.space, args.n)
    p = fx.presentation()
    if fx.gamma:
        res = fx.gamma_result(p)
        for name, c in fx.stated.items():
            if (p.gen(fx.preferred) * (c - fx.gamma[name])).is_zero():
                continue
            print(
                f"warning: {name}: stated value {c}·{fx.symbol(fx.preferred)} differs from the "
                f"derived {fx.gamma[name] % (args.n ** 2)}·{fx.symbol(fx.preferred)}",
                file=sys.stderr,
            )
    else:
        res = gamma_all(fx.diagram(), fx.spin_names(), fx.preferred, p)
    sym = fx.symbol(fx.preferred)
    values = []
    parts = [p.describe()]
    for e in res.entries:
        spin = e.spin if e.spin is not None else fx.spins[e.name]
        coeff = res.coefficient(e.name)
        values.append({"spin": list(spin.members), "name": e.name, "coeff": coeff, "generator": sym})
        parts.append(f"spin {spin}: {coeff}·{sym}")
    _emit(args, {"space": args.space, "n": args.n, "order": p.order, "values": values}, "; ".join(parts))
    return 0


def cmd_h1(args) -> int:
    fx = _load_link(args)
    p = fx.presentation()
    _emit(
        args,
        {"space": args.space, "n": args.n, "order": p.order, "invariant_factors": list(p.invariant_factors)},
        p.describe(),
    )
    return 0


def cmd_spin(args) -> int:
    fx = _load_link(args)
    spins = characteristic_sublinks(fx.link)
    names = fx.spin_names()
    rows = [{"spin": list(s.members), "name": names.get(s)} for s in spins]
    text = "\n".join(f"{names[s]}: {s}" if s in names else str(s) for s in spins)
    _emit(args, {"space": args.space, "n": args.n, "count": len(spins), "values": rows}, text)
    return 0


def cmd_cf(args) -> int:
    if args.coeffs:
        coeffs = args.coeffs
        try:
            value = cf_value(coeffs)
        except MalformedCFError as exc:
            raise UsageError(str(exc)) from None
    else:
        if args.p is None or args.q is None:
            raise UsageError("give --p and --q, or --coeffs")
        try:
            coeffs = list(neg_cf_expand(args.p, args.q).coefficients)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        value = cf_value(coeffs)
    text = f"[{', '.join(str(c) for c in coeffs)}] = {value.numerator}/{value.denominator}"
    _emit(args, {"coefficients": coeffs, "value": [value.numerator, value.denominator]}, text)
    return 0


def cmd_kirby(args) -> int:
    if args.file:
        with open(args.file, encoding="utf-8") as fh:
            script = parse_script(fh.read())
    elif args.script and args.n is not None:
        script = fixtures.load_script(args.script, args.n)
    else:
        raise UsageError("give --script and --n, or --file")
    trace: list = []
    end = run_script(script, trace=trace)
    classes = {lab: end.describe_class(lab) for lab in end.link.labels}
    steps = [{"step": k, "move": str(m), "framings": list(s.link.framings)} for k, m, s in trace]
    lines = [str(end.link).rstrip()]
    lines += [f"{lab} = {c}" for lab, c in classes.items()]
    lines.append(f"H1 = {end.presentation().describe()} after {len(trace)} moves")
    _emit(
        args,
        {"link": str(end.link), "classes": classes, "steps": steps, "group": end.presentation().describe()},
        "\n".join(lines),
    )
    return 0


def _surface_grid(args):
    if args.grid:
        return lg.SurfaceGrid(args.grid[0], args.grid[1], args.eps)
    return lg.SurfaceGrid(eps=args.eps)


def cmd_symcheck(args) -> int:
    check = args.check
    tol = TOLERANCES[check]
    extra = {}
    if check == "lagrangian":
        if args.psi == "sharp":
            surface = lg.sigma_sharp(args.n, args.q, args.eps)
        else:
            model = lg.ImmersionModel(args.n, args.q, args.psi, args.eps)
            surface = lg.sigma_general(model, args.form)
        value = lg.lagrangian_defect(surface, _surface_grid(args), args.h)
    elif check == "flow":
        fm = lg.FlowModel(args.flow)
        s = lg.symplecto_defect(lg.flow_phi(fm), h=args.h)
        e = lg.flow_eq_defect(fm, h=args.h)
        extra = {"symplecto": s, "flow_eq": e}
        value = max(s, e)
    elif check == "cover":
        psi = "linear" if args.psi == "sharp" else args.psi
        model = lg.ImmersionModel(args.n, args.q, psi, args.eps, _surface_grid(args))
        value = lg.cover_identity_defect(model, args.form)
    elif check == "legendrian":
        value = lg.legendrian_defect(args.n, args.a)
        extra = {"level_set": lg.knot_level_set(args.n, args.a), "a_squared": args.a**2}
    else:
        value = lg.stereo_identity_defect(args.a)
        extra = {"sphere_constraint": lg.sphere_constraint_defect(args.a)}
    value = float(value)
    extra = {k: float(v) for k, v in extra.items()}
    ok = bool(value < tol)
    text = f"{check}: defect {value:.3e} ({'pass' if ok else 'FAIL'}, tolerance {tol:g})"
    for k, v in extra.items():
        text += f"\n  {k}: {v:.6g}"
    _emit(args, {"check": check, "defect": value, "tolerance": tol, "ok": ok, **extra}, text)
    return 0 if ok else 1


def _parse_range(text: str) -> tuple[int, int]:
    lo, sep, hi = text.partition("..")
    try:
        a, b = int(lo), int(hi if sep else lo)
    except ValueError:
        raise UsageError(f"bad range {text!r}; expected A..B") from None
    if a < 2:
        raise UsageError("range must start at n >= 2")
    if b < a:
        raise UsageError(f"empty range {text!r}")
    return a, b


def cmd_verify(args) -> int:
    lo, hi = _parse_range(args.n_range)
    rep = checks.verify_range(lo, hi, numerics=not args.no_numerics, kirby_max=args.kirby_max)
    for d in rep.discrepancies:
        print(f"warning: {d}", file=sys.stderr)
    if args.json:
        _emit(
            args,
            {
                "range": [lo, hi],
                "ok": rep.ok,
                "checks": [c.as_dict() for c in rep.checks],
                "discrepancies": rep.discrepancies,
            },
            "",
        )
        return rep.exit_status
    lines = []
    for crit, items in sorted(rep.by_criterion().items()):
        bad = [c for c in items if not c.ok]
        lines.append(f"criterion {crit}: {len(items) - len(bad)}/{len(items)} pass")
        for c in bad:
            where = f" n={c.n}" if c.n is not None else ""
            lines.append(f"  FAIL {c.name}{where}: {c.detail}")
    pairs = [c for c in rep.checks if c.name.startswith("μ/") and c.ok]
    for c in pairs:
        lines.append(f"  n={c.n} {c.name}: {c.detail}")
    lines.append("all checks pass" if rep.ok else f"{len(rep.failures())} checks failed")
    print("\n".join(lines))
    return rep.exit_status


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ratblowup", description=__doc__.splitlines()[0])
    parser.add_argument("--fixtures", metavar="DIR", help="directory of fixture templates to use instead of the bundled ones")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, space=True):
        p.add_argument("--json", action="store_true", help="machine-readable output")
        if space:
            p.add_argument("--space", choices=sorted(fixtures.SPACES))
            p.add_argument("--n", type=int)

    p = sub.add_parser("gamma", help="Gamma invariant for every spin structure")
    p.add_argument("--json", action="store_true")
    p.add_argument("--space", choices=sorted(fixtures.SPACES), required=True)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_gamma)

    p = sub.add_parser("h1", help="first homology of the surgered boundary")
    common(p)
    p.add_argument("--file", help="link file in the text format")
    p.set_defaults(func=cmd_h1)

    p = sub.add_parser("spin", help="characteristic sublinks")
    common(p)
    p.add_argument("--file", help="link file in the text format")
    p.set_defaults(func=cmd_spin)

    p = sub.add_parser("cf", help="negative continued fractions")
    common(p, space=False)
    p.add_argument("--p", type=int)
    p.add_argument("--q", type=int)
    p.add_argument("--coeffs", type=int, nargs="+", help="evaluate these coefficients instead")
    p.set_defaults(func=cmd_cf)

    p = sub.add_parser("kirby", help="replay a Kirby move script")
    common(p, space=False)
    p.add_argument("--script", choices=["bn_to_lens", "bn_to_cn"])
    p.add_argument("--n", type=int)
    p.add_argument("--file", help="script file: start diagram followed by moves")
    p.set_defaults(func=cmd_kirby)

    p = sub.add_parser("symcheck", help="numeric checks of the collar model")
    common(p, space=False)
    p.add_argument("--check", choices=sorted(TOLERANCES), required=True)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--q", type=int, default=1)
    p.add_argument("--psi", default="sharp", choices=["sharp", *lg.PSI_CATALOG])
    p.add_argument("--flow", default="rsin", choices=list(lg.FLOW_CATALOG))
    p.add_argument("--form", default="scaled", choices=["scaled", "lagrangian"])
    p.add_argument("--grid", type=int, nargs=2, metavar=("T", "I"))
    p.add_argument("--eps", type=float, default=0.2)
    p.add_argument("--h", type=float, default=1e-5)
    p.add_argument("--a", type=float, default=0.01)
    p.set_defaults(func=cmd_symcheck)

    p = sub.add_parser("verify", help="run the acceptance checks for a range of n")
    p.add_argument("--json", action="store_true")
    p.add_argument("--n-range", required=True, metavar="A..B")
    p.add_argument("--no-numerics", action="store_true", help="skip the floating-point checks")
    p.add_argument("--kirby-max", type=int, default=12, help="replay move scripts only up to this n (default 12)")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    fixtures.set_fixture_dir(args.fixtures)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except (ParseError, LinkError, fixtures.FixtureError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    finally:
        fixtures.set_fixture_dir(None)


if __name__ == "__main__":
    sys.exit(main())
