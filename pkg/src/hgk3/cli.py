"""Command-line entry point ``hgk3``.

Exit codes: 0 success, 1 verification failure, 2 input error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from dataclasses import asdict, dataclass, field
from fractions import Fraction

from . import elliptic, k3_oracle
from .cache import CountCache
from .elliptic import CM_TABLE, is_cm_heuristic
from .errors import BadParameter, InputError, VerificationFailure
from .finite_field import primes_in
from .frobenius_k3 import CharPoly3, predict_charpoly, predict_charpoly_C, verify_weil
from .k3_oracle import SurfaceFamily
from .qseries import TRIPLES
from .suites import SUITES, fan_out, run_suite

log = logging.getLogger("hgk3")

CSV_COLUMNS = ["family", "p", "a", "case", "A", "c1", "c2", "c3", "observed", "n_quotient", "pass"]
LOOP_BUDGET = 2**40
FAMILIES = {"dwork": SurfaceFamily.DWORK, "aop": SurfaceFamily.AOP, "triple": SurfaceFamily.TRIPLE}


@dataclass
class ZetaReport:
    triple: str
    p: int
    a: str
    case: str
    chi: int
    A: int
    coeffs: list
    factors: dict
    provenance: dict = field(default_factory=dict)

    @classmethod
    def from_charpoly(cls, triple: str, a: Fraction, chi: int, cp: CharPoly3, A: int, case: str) -> "ZetaReport":
        counts = [{"key": k, "count": n, "source": src} for k, n, src in cp.provenance["counts"]]
        return cls(
            triple=triple,
            p=cp.q,
            a=str(a),
            case=case,
            chi=chi,
            A=A,
            coeffs=list(cp.coeffs),
            factors={"linear_sign": cp.linear_sign, "quad": [cp.quad_trace, cp.q**2]},
            provenance={
                "via": cp.provenance["via"],
                "counts": counts,
                "cache_hits": sum(c["source"] != "computed" for c in counts),
            },
        )

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ZetaReport":
        return cls(**json.loads(text))

    def charpoly(self) -> CharPoly3:
        return CharPoly3.from_factors(self.factors["linear_sign"], self.factors["quad"][0], self.p)

    def render(self) -> str:
        cp = self.charpoly()
        c1, c2, c3 = self.coeffs
        return "\n".join([
            f"triple={self.triple} p={self.p} a={self.a} case={self.case} chi={self.chi} A={self.A}",
            f"cubic: {cp}",
            f"coeffs: 1 {c1:+d}T {c2:+d}T^2 {c3:+d}T^3",
        ])


def parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def parse_primes(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def build_report(alpha: str, p: int, a: Fraction, chi: int = 1, via: str = "E") -> ZetaReport:
    if chi not in (1, -1):
        raise BadParameter(f"chi must be +1 or -1, got {chi}")
    cp_e = predict_charpoly(alpha, a, p, chi)
    cp = predict_charpoly_C(alpha, a, p, chi) if via == "C" else cp_e
    w = verify_weil(cp, p, chi)
    if not w:
        raise VerificationFailure(f"predicted cubic fails the Weil checks: {w.reason}")
    # A and the split case always come from the E-route
    A = cp_e.quad_trace * chi
    return ZetaReport.from_charpoly(alpha, a, chi, cp, A, cp_e.case.value)


def cmd_predict(args) -> int:
    report = build_report(args.alpha, args.p, args.a, args.chi, args.via)
    print(report.to_json() if args.json else report.render())
    return 0


def cmd_verify(args) -> int:
    res = run_suite(args.suite, order=args.order, pmax=args.pmax, seed=args.seed, jobs=args.jobs)
    print(f"suite {res.name}: {res.passed}/{res.total} passed, {res.total - res.passed} failed, {res.skipped} skipped")
    if res.failures:
        print("first failure: " + json.dumps(res.failures[0], sort_keys=True, default=str))
        return 1
    return 0


# oracle ---------------------------------------------------------------------


def loop_count(family: SurfaceFamily, pmax: int) -> int:
    per_a = (lambda p: p**3) if family is SurfaceFamily.DWORK else (lambda p: p**2)
    return sum(per_a(p) * (p - 2) for p in primes_in(5, pmax))


def _dwork_rows(p: int) -> list[dict]:
    rows = []
    for a in k3_oracle.valid_parameters(p):
        rep = k3_oracle.dwork_divisibility_check(a, p)
        cp = predict_charpoly("quarter", a, p)
        rows.append({
            "family": "dwork", "p": p, "a": a, "case": cp.case.value, "A": rep.A,
            "c1": cp.c1, "c2": cp.c2, "c3": cp.c3, "observed": rep.count,
            "n_quotient": "" if rep.n is None else rep.n, "pass": rep.ok,
        })
    return rows


def _char_sum_rows(family: SurfaceFamily, model, pmax: int) -> list[dict]:
    rows = []
    observe = k3_oracle.OBSERVERS[family]
    for p in primes_in(5, pmax):
        for a in k3_oracle.valid_parameters(p):
            cp = predict_charpoly(model.triple, a, p)
            obs = observe(a, p)
            pred = model.predict(a, p)
            resid = "" if pred is None else obs - pred
            rows.append({
                "family": family.name.lower(), "p": p, "a": a, "case": cp.case.value,
                "A": cp.quad_trace, "c1": cp.c1, "c2": cp.c2, "c3": cp.c3,
                "observed": obs, "n_quotient": resid, "pass": resid == 0,
            })
    return rows


def cmd_oracle(args) -> int:
    family = FAMILIES[args.family]
    loops = loop_count(family, args.pmax)
    if loops > LOOP_BUDGET and not args.force:
        raise BadParameter(f"{loops} loop iterations exceed the budget of 2^40; pass --force to run anyway")
    out = csv.DictWriter(sys.stdout, fieldnames=CSV_COLUMNS, lineterminator="\n")
    out.writeheader()
    ok = True
    if family is SurfaceFamily.DWORK:
        if args.pmax > k3_oracle.MAX_DWORK_PRIME and not args.force:
            raise BadParameter(f"dwork counts are limited to p <= {k3_oracle.MAX_DWORK_PRIME} without --force")
        rows = fan_out(_dwork_rows, list(primes_in(5, args.pmax)), args.jobs)
        for row in sorted(rows, key=lambda r: (r["p"], r["a"])):
            out.writerow(row)
            ok &= row["pass"]
        failed = sum(not r["pass"] for r in rows)
        print(f"dwork: {len(rows) - failed}/{len(rows)} divisibility checks passed", file=sys.stderr)
        return 0 if ok else 1

    model = k3_oracle.calibrate(family, "half", args.train)
    report = k3_oracle.validate(model, (17, args.pmax))
    for row in _char_sum_rows(family, model, args.pmax):
        out.writerow(row)
        ok &= row["pass"]
    print(f"{family.value}: sign={model.sign} model={_model_summary(model)}", file=sys.stderr)
    print(f"{family.value}: validation {report.passed}/{report.total} exact for 17 <= p <= {args.pmax}", file=sys.stderr)
    if report.counterexample is not None:
        print(f"{family.value}: first counterexample (p, a, observed, predicted) = {report.counterexample}", file=sys.stderr)
    if family is SurfaceFamily.AOP:
        other = k3_oracle.validate(k3_oracle.calibrate(SurfaceFamily.TRIPLE, "half", args.train), (17, args.pmax))
        diff = k3_oracle.compare_traces(report, other)
        print(f"{family.value}: extracted traces differ from TripleProduct at {len(diff)} points", file=sys.stderr)
        if diff:
            print(f"first difference: {diff[0]}", file=sys.stderr)
            ok = False
    return 0 if ok and report.ok else 1


def _model_summary(model) -> str:
    return ";".join(f"{sig}:{c}" for sig, c in sorted(model.coeffs.items()))


# cm-table -------------------------------------------------------------------


def cmd_cm_table(args) -> int:
    values = args.a if args.a else CM_TABLE[args.alpha]
    for a in values:
        try:
            d = is_cm_heuristic(args.alpha, a, args.bound)
        except InputError as exc:
            print(f"a={a} CM=error ({exc})")
            continue
        verdict = "true" if d.cm else "false"
        print(f"a={a} CM={verdict} supersingular={len(d.supersingular)}/{d.tested} fraction={d.fraction:.3f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hgk3", description="Frobenius cubics on hypergeometric K3 fibers, and checks on them.")
    ap.add_argument("--cache", help="JSON-lines point-count cache (default: $HGK3_CACHE)")
    ap.add_argument("--jobs", type=int, default=1, help="worker processes for grid campaigns")
    ap.add_argument("--seed", type=int, default=0, help="seed for randomized selections")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("predict", help="predicted Frobenius cubic at t = a")
    p.add_argument("--alpha", choices=list(TRIPLES), required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--a", type=parse_fraction, required=True)
    p.add_argument("--chi", type=int, default=1)
    p.add_argument("--via", choices=["E", "C"], default="E")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_predict)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("--suite", choices=list(SUITES), required=True)
    v.add_argument("--order", type=int)
    v.add_argument("--pmax", type=int)
    v.set_defaults(func=cmd_verify)

    o = sub.add_parser("oracle", help="brute-force surface counts against the prediction (CSV on stdout)")
    o.add_argument("--family", choices=list(FAMILIES), required=True)
    o.add_argument("--pmax", type=int, required=True)
    o.add_argument("--train", type=parse_primes, default=(5, 7, 11, 13))
    o.add_argument("--force", action="store_true", help="ignore the loop budget")
    o.set_defaults(func=cmd_oracle)

    c = sub.add_parser("cm-table", help="supersingular-density verdicts for the singular-fiber table")
    c.add_argument("--alpha", choices=list(TRIPLES), required=True)
    c.add_argument("--bound", type=int, default=500)
    c.add_argument("--a", type=parse_fraction, action="append", help="ad-hoc value; repeatable (use --a=-1/8 for negatives)")
    c.set_defaults(func=cmd_cm_table)
    return ap


def _error_json(exc: Exception) -> str:
    return json.dumps({"error": type(exc).__name__, "message": str(exc)}, sort_keys=True)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        cache = CountCache.from_env(args.cache)
        elliptic.set_persistent_cache(cache)
        try:
            return args.func(args)
        finally:
            elliptic.set_persistent_cache(None)
    except InputError as exc:
        print(_error_json(exc), file=sys.stderr)
        return 2
    except VerificationFailure as exc:
        print(_error_json(exc), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
