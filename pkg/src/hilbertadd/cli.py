"""Command-line surface.

Deterministic given inputs and caps; exits 2 on usage errors (argparse), 3
when a resource cap is exceeded (with partial JSON on stdout when there is
any), and 1 on an internal assertion failure.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import acceptance, binom, em, homotopy, witt
from .errors import ResourceError
from .homalg import FgAb
from .rings import RingSpec


def canon_json(obj) -> str:
    """Canonical JSON: sorted keys, compact separators; round-trips bytewise."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _ring_from_flags(args) -> RingSpec:
    if args.mod is not None:
        return RingSpec.mod(args.mod)
    if args.rat:
        return RingSpec.rationals()
    return RingSpec.integers()


def _add_ring_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--int", dest="int_", action="store_true", help="coefficients in Z (default)")
    p.add_argument("--mod", type=int, default=None, metavar="M", help="coefficients in Z/M")
    p.add_argument("--rat", action="store_true", help="coefficients in Q")


def _emit(args, payload_text: str, payload_json) -> None:
    if args.format == "json":
        print(canon_json(payload_json))
    else:
        print(payload_text)


def _fgab_json(g: FgAb) -> dict:
    return {"rank": g.rank, "torsion": list(g.torsion)}


# ---------------------------------------------------------------------------
# hopf


def _cmd_hopf(args) -> int:
    if args.op == "mul":
        p = binom.parse_binpoly(args.lhs)
        q = binom.parse_binpoly(args.rhs)
        r = binom.mul(p, q)
        _emit(args, binom.render_binpoly(r), json.loads(binom.binpoly_to_json(r)))
    elif args.op == "comul":
        t = binom.comul(binom.parse_binpoly(args.lhs))
        _emit(args, str(t), {"slots": t.slots,
                             "terms": {",".join(map(str, k)): str(v)
                                       for k, v in sorted(t.terms.items())}})
    elif args.op == "antipode":
        r = binom.antipode(binom.parse_binpoly(args.lhs))
        _emit(args, binom.render_binpoly(r), json.loads(binom.binpoly_to_json(r)))
    elif args.op == "values":
        if args.from_values:
            vals = [int(v) for v in args.from_values.split(",")]
            r = binom.from_values(vals)
            _emit(args, binom.render_binpoly(r), json.loads(binom.binpoly_to_json(r)))
        else:
            p = binom.parse_binpoly(args.lhs)
            vals = binom.to_values(p, args.upto)
            _emit(args, ",".join(map(str, vals)), {"values": [str(v) for v in vals]})
    return 0


# ---------------------------------------------------------------------------
# witt


def _witt_json(x: witt.WittVec) -> dict:
    from .rings import render_elem
    return {"ring": x.spec.short(), "trunc": x.trunc,
            "coeffs": [render_elem(c) for c in x.coeffs]}


def _cmd_witt(args) -> int:
    spec = _ring_from_flags(args)
    out = None
    if args.op in ("add", "mul"):
        x = witt.parse_witt(spec, args.series, args.trunc)
        y = witt.parse_witt(spec, args.series2, args.trunc)
        out = witt.witt_add(x, y) if args.op == "add" else witt.witt_mul(x, y)
    elif args.op == "neg":
        out = witt.witt_neg(witt.parse_witt(spec, args.series, args.trunc))
    elif args.op == "frob":
        x = witt.parse_witt(spec, args.series, args.trunc)
        out = witt.frobenius(args.n, x)
    elif args.op == "ghost":
        x = witt.parse_witt(spec, args.series, args.trunc)
        g = witt.ghost(x)
        from .rings import render_elem
        _emit(args, ",".join(render_elem(v) for v in g.values),
              {"ghost": [render_elem(v) for v in g.values]})
        return 0
    elif args.op == "embed":
        seq = binom.point_from_integer(args.a, args.trunc, spec)
        out = witt.embed_H(seq)
    elif args.op == "fixed":
        x = witt.parse_witt(spec, args.series, args.trunc)
        primes = [int(p) for p in args.primes.split(",")]
        ok, report = witt.is_partial_fixed(x, primes)
        _emit(args, f"fixed: {ok}" + (f" failures: {report}" if report else ""),
              {"fixed": ok, "failures": [[p, k] for p, k in report]})
        return 0
    elif args.op == "enumerate":
        primes = [int(p) for p in args.primes.split(",")] if args.primes else []
        found = witt.enumerate_partial_fixed(spec, args.trunc, primes, cap=args.cap)
        text = "\n".join(witt.render_witt(v) for v in found)
        _emit(args, f"count: {len(found)}\n{text}",
              {"count": len(found), "vectors": [_witt_json(v) for v in found]})
        return 0
    _emit(args, witt.render_witt(out), _witt_json(out))
    return 0


# ---------------------------------------------------------------------------
# cohomology


def _report_text(rep: em.KHReport) -> str:
    lines = [f"K(H,{rep.n}) cohomology through degree {rep.max_degree}, "
             f"weights <= {rep.max_weight} "
             f"({'normalized' if rep.normalized else 'unnormalized'} complex)"]
    for d in range(rep.max_degree + 1):
        per_w = [f"w={w}:{rep.weights[w][d]}" for w in sorted(rep.weights)
                 if d in rep.weights[w]]
        match = rep.match(d)
        verdict = "?" if match is None else ("ok" if match else "MISMATCH")
        lines.append(f"  H^{d} = {rep.totals[d]}  [{' '.join(per_w) or '-'}]  "
                     f"classical: {verdict}")
    if rep.partial:
        lines.append(f"  PARTIAL: weights {list(rep.skipped_weights)} skipped (cap)")
    lines.append("  note: weights above the cap are unverified, not claimed zero")
    return "\n".join(lines)


def _report_csv(rep: em.KHReport) -> str:
    rows = ["d,total_rank,total_torsion,classical_match"]
    for d in range(rep.max_degree + 1):
        t = rep.totals[d]
        rows.append(f"{d},{t.rank},{'+'.join(map(str, t.torsion))},{rep.match(d)}")
    return "\n".join(rows)


def _cmd_cohomology(args) -> int:
    if args.which == "bar-s1":
        res = em.bar_tor_S1(args.max_weight)
        text = "\n".join(
            f"s={s}: " + ", ".join(f"H_{t} = {g}" for t, g in sorted(res.get(s, {}).items()))
            if res.get(s) else f"s={s}: 0"
            for s in range(args.max_weight + 1))
        payload = {str(s): {str(t): _fgab_json(g) for t, g in res.get(s, {}).items()}
                   for s in range(args.max_weight + 1)}
        _emit(args, text, payload)
        return 0
    normalized = not args.unnormalized
    if args.which == "kh1":
        rep = em.cohomology_KH1(args.max_weight, args.max_degree, normalized=normalized)
    else:
        rep = em.cohomology_KHn(args.n, args.max_degree, args.max_weight,
                                normalized=normalized, jobs=args.jobs,
                                cap=args.max_rank)
    if args.format == "csv":
        print(_report_csv(rep))
    else:
        _emit(args, _report_text(rep), rep.to_jsonable())
    return 0


# ---------------------------------------------------------------------------
# calc


def _cmd_calc(args) -> int:
    if args.op == "fpqc":
        m = homotopy.parse_fgab(args.m)
        g = homotopy.fpqc_cohomology(m, args.i)
        _emit(args, g.render(), {"group": g.to_jsonable()})
        return 0
    pi = homotopy.parse_pi_tower(args.pi)
    if args.op == "affinize":
        sd = homotopy.pi_affinization(pi, args.i)
        _emit(args, sd.render(), {"base": _fgab_json(sd.base)})
    elif args.op == "global-points":
        g = homotopy.pi_global_points(pi, args.i)
        _emit(args, g.render(), {"group": g.to_jsonable()})
    elif args.op == "adelic":
        rep = homotopy.adelic_report(pi, args.i)
        j = rep.to_jsonable()
        text = (f"pi_{args.i} rational: {rep.rational.render()}\n"
                + "".join(f"pi_{args.i} at p={p}: {g.render()}\n"
                          for p, g in sorted(rep.padic.items()))
                + f"glued: {rep.reconstructed.render()}\n"
                + f"direct: {rep.direct.render()}\n"
                + f"verdict: {j['verdict']}")
        _emit(args, text, j)
    elif args.op == "loops":
        g = homotopy.free_loop_padic(pi, args.p, args.i)
        _emit(args, g.render(), {"group": g.to_jsonable()})
    elif args.op == "retract":
        ok, comp = homotopy.retraction_check(pi, args.i)
        _emit(args, f"retraction: {ok}; complement: {comp.render()}",
              {"retracts": ok, "complement": comp.to_jsonable()})
    return 0


# ---------------------------------------------------------------------------
# verify


def _cmd_verify(args) -> int:
    numbers = [int(x) for x in args.criteria.split(",")] if args.criteria else None
    lines: list[str] = []
    results = acceptance.run_all(numbers, echo=lines.append)
    if args.format == "json":
        print(canon_json([{"number": r.number, "title": r.title, "passed": r.passed,
                           "seconds": round(r.seconds, 3), "detail": r.detail}
                          for r in results]))
    elif args.format == "csv":
        print("number,passed,seconds,title")
        for r in results:
            print(f"{r.number},{r.passed},{r.seconds:.3f},{r.title}")
    else:
        print("\n".join(lines))
    return 0 if all(r.passed for r in results) else 1


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="hilbertadd",
        description="exact workbench for the Hilbert additive group scheme")
    ap.add_argument("--format", choices=("text", "json", "csv"), default="text")
    sub = ap.add_subparsers(dest="cmd", required=True)

    hopf = sub.add_parser("hopf", help="binomial-ring Hopf algebra operations")
    hopf.add_argument("op", choices=("mul", "comul", "antipode", "values"))
    hopf.add_argument("lhs", nargs="?", help="polynomial, e.g. 'b1 + 2*b2'")
    hopf.add_argument("rhs", nargs="?", help="second polynomial (mul)")
    hopf.add_argument("--upto", type=int, default=6, help="evaluate at 0..upto")
    hopf.add_argument("--from", dest="from_values", default=None,
                      metavar="V0,V1,..", help="interpolate from values at 0..d")
    hopf.set_defaults(func=_cmd_hopf)

    wt = sub.add_parser("witt", help="truncated big Witt vector operations")
    wt.add_argument("op", choices=("add", "neg", "mul", "frob", "ghost",
                                   "embed", "fixed", "enumerate"))
    wt.add_argument("--series", default="", metavar="a1,a2,..",
                    help="coefficients of 1 + a1 T + ...")
    wt.add_argument("--series2", default="", metavar="a1,a2,..",
                    help="second operand for add/mul")
    wt.add_argument("--trunc", type=int, required=True)
    wt.add_argument("--n", type=int, default=2, help="Frobenius index")
    wt.add_argument("--a", type=int, default=1, help="integer point to embed")
    wt.add_argument("--primes", default="", metavar="P1,P2,..")
    wt.add_argument("--cap", type=int, default=2 * 10**5,
                    help="enumeration search-space cap")
    _add_ring_flags(wt)
    wt.set_defaults(func=_cmd_witt)

    co = sub.add_parser("cohomology", help="weight-graded cochain computations")
    co.add_argument("which", choices=("kh1", "khn", "bar-s1"))
    co.add_argument("--n", type=int, default=2)
    co.add_argument("--max-weight", type=int, default=6)
    co.add_argument("--max-degree", type=int, default=6)
    co.add_argument("--unnormalized", action="store_true",
                    help="use the full cosimplicial complex (slow; same cohomology)")
    co.add_argument("--jobs", type=int, default=1,
                    help="parallel workers over weight blocks")
    co.add_argument("--max-rank", type=int, default=None,
                    help="per-degree basis cap; exceeding it aborts with partial results")
    co.set_defaults(func=_cmd_cohomology)

    calc = sub.add_parser("calc", help="symbolic homotopy calculator")
    calc.add_argument("op", choices=("affinize", "global-points", "fpqc",
                                     "adelic", "loops", "retract"))
    calc.add_argument("--pi", default="0", metavar="2:Z;3:Z+Z/4",
                      help="homotopy tower")
    calc.add_argument("--m", default="0", help="coefficient group, e.g. 'Z+Z/6'")
    calc.add_argument("--i", type=int, required=True, help="degree")
    calc.add_argument("--p", type=int, default=2, help="prime (loops)")
    calc.set_defaults(func=_cmd_calc)

    ver = sub.add_parser("verify", help="run the acceptance suite")
    ver.add_argument("what", choices=("all",))
    ver.add_argument("--criteria", default=None, metavar="1,2,..",
                     help="subset of criteria to run")
    ver.set_defaults(func=_cmd_verify)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ResourceError as exc:
        if getattr(exc, "partial", None) is not None and hasattr(exc.partial, "to_jsonable"):
            print(canon_json({"error": str(exc), "partial": exc.partial.to_jsonable()}))
        else:
            print(canon_json({"error": str(exc)}))
        return 3
    except AssertionError as exc:
        print(f"internal assertion failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
