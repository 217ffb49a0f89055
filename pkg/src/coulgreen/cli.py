"""coulgreen command line: green, kgen, jmom, verify, bench.

Exit codes: 0 success, 1 verification failure, 2 domain error,
3 tolerance failure.
"""
import argparse
import csv
import json
import os
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

import mpmath as mp

from .integrals import (IntegralResult, c_value, d_value, h_value, identity_c,
                        identity_d, identity_h, j_mom, k_gen)
from .numerics import DomainError, PrecisionContext, ToleranceError, to_fraction
from .rcgf import QuantumIndex, green

CSV_FIELDS = ["n", "l", "q", "qp", "beta", "betap", "Z", "value", "abs_err_est",
              "branch", "wall_time_ns"]


def _ctx(args, n):
    kw = {}
    digits = args.precision or os.environ.get("RCGF_PRECISION")
    if digits:
        try:
            kw["working_digits"] = int(digits)
        except ValueError:
            raise DomainError(f"bad precision {digits!r}")
    if args.tol is not None:
        kw["target_rel_tol"] = args.tol
    return PrecisionContext.for_n(n, **kw)


def _idx(args):
    return QuantumIndex(args.n, args.l, to_fraction(args.Z))


def _emit(results, fmt, out=None):
    out = out or sys.stdout
    if fmt == "csv":
        w = csv.DictWriter(out, CSV_FIELDS, lineterminator="\n")
        w.writeheader()
        for r in results:
            inp = r.inputs_echo
            w.writerow({
                "n": inp.get("n"), "l": inp.get("l"), "q": inp.get("q", ""),
                "qp": inp.get("qp", ""), "beta": inp.get("beta", ""),
                "betap": inp.get("betap", ""), "Z": inp.get("Z"),
                "value": mp.nstr(r.value, mp.mp.dps, strip_zeros=False),
                "abs_err_est": repr(float(r.abs_err_est)),
                "branch": ";".join(r.branch_tags), "wall_time_ns": r.wall_time_ns})
        return
    docs = [r.to_dict() for r in results]
    json.dump(docs[0] if len(docs) == 1 else docs, out, indent=2)
    out.write("\n")


def _green(args):
    idx = _idx(args)
    ctx = _ctx(args, idx.n)
    t0 = time.perf_counter_ns()
    with ctx.workdps():
        tv = green(idx, to_fraction(args.r), to_fraction(args.rp), ctx)
    return [IntegralResult(tv.value, tv.abs_err_est, [tv.branch],
                           time.perf_counter_ns() - t0,
                           {"n": idx.n, "l": idx.l, "Z": str(idx.Z), "r": args.r, "rp": args.rp})]


def _kgen_one(job):
    n, l, Z, beta, betap, q, qp, digits, tol = job
    ctx = PrecisionContext.for_n(n, working_digits=digits, target_rel_tol=tol)
    return k_gen(QuantumIndex(n, l, Z), beta, betap, q, qp, ctx)


def _jmom_one(job):
    n, l, Z, beta, x, q, digits, tol = job
    ctx = PrecisionContext.for_n(n, working_digits=digits, target_rel_tol=tol)
    return j_mom(QuantumIndex(n, l, Z), beta, x, q, ctx)


def _run(fn, jobs, workers):
    if workers > 1 and len(jobs) > 1:
        # mpmath precision is process-global, so fan out over processes
        with ProcessPoolExecutor(workers) as ex:
            return list(ex.map(fn, jobs))
    return [fn(j) for j in jobs]


def _kgen(args):
    idx = _idx(args)
    ctx = _ctx(args, idx.n)
    job = (idx.n, idx.l, idx.Z, to_fraction(args.beta), to_fraction(args.betap),
           args.q, args.qp, ctx.working_digits, ctx.target_rel_tol)
    with ctx.workdps():
        return [_kgen_one(job)]


def _jmom(args):
    idx = _idx(args)
    ctx = _ctx(args, idx.n)
    xs = [to_fraction(x) for x in args.x]
    if any(x <= 0 for x in xs):
        raise DomainError("radii must be positive")
    jobs = [(idx.n, idx.l, idx.Z, to_fraction(args.beta), x, args.q,
             ctx.working_digits, ctx.target_rel_tol) for x in xs]
    with ctx.workdps():
        return _run(_jmom_one, jobs, args.jobs)


# --- verify ----------------------------------------------------------------

def _rand_rational(rng, avoid=()):
    while True:
        x = Fraction(rng.randint(-9, 9), rng.randint(1, 9))
        if x != 0 and x not in avoid:
            return x


def verify_identities(nmax=10, draws=5, seed=0):
    rng = random.Random(seed)
    count, bad = {"h": 0, "c": 0, "d": 0}, []
    for n in range(1, nmax + 1):
        for l in range(0, nmax + 1):
            idx = QuantumIndex(n, l)
            for _ in range(draws):
                if idx.low:
                    for q in range(l + 1):
                        x = _rand_rational(rng, (-1,))
                        a, b = identity_c(idx, q, x)
                        count["c"] += 1
                        if a != b or c_value(idx, q, x) != 0:
                            bad.append(("c", n, l, q, str(x)))
                    continue
                for q in range(l + 1):
                    x = _rand_rational(rng, (-1,))
                    a, b = identity_h(idx, q, x)
                    count["h"] += 1
                    if a != b or h_value(idx, q, x) != 0:
                        bad.append(("h", n, l, q, str(x)))
                for p in range(2 * l + 1):
                    for r in range(1, l):
                        x, y = _rand_rational(rng), _rand_rational(rng, (-1,))
                        count["d"] += 1
                        if d_value(idx, p, r, x, y) != 0:
                            bad.append(("d", n, l, p, r, str(x), str(y)))
    return {"suite": "identities", "cases": count, "failures": bad, "ok": not bad}


K_RATES = [(Fraction(37, 100), Fraction(37, 100)), (Fraction(1), Fraction(2)),
           (Fraction(2), Fraction(1))]


def verify_oracle_k(nmax=6, lmax=7, qmax=3, tol=1e-7, floor=1e-10):
    from .oracle import oracle_k_batch
    worst, rows = 0.0, 0
    for n in range(1, nmax + 1):
        for l in range(lmax + 1):
            idx = QuantumIndex(n, l)
            cases = [(b, bp, q, qp) for b, bp in K_RATES
                     for q in range(qmax + 1) for qp in range(qmax + 1)]
            ref = oracle_k_batch(idx, cases)
            for c, o in zip(cases, ref):
                v = float(k_gen(idx, *c).value)
                dev = abs(v - o.value) / max(abs(o.value), floor / tol)
                worst = max(worst, dev)
                rows += 1
    return {"suite": "oracle-k", "cases": rows, "max_rel_dev": worst, "ok": worst <= tol}


def j_grid_rates(n):
    return [Fraction(37, 100), Fraction(1), Fraction(1, n)]


J_RADII = [Fraction(1, 10), Fraction(1), Fraction(5), Fraction(20)]


def verify_oracle_j(nmax=6, lmax=7, qmax=3, tol=1e-7, floor=1e-10):
    from .oracle import oracle_j
    worst, rows = 0.0, 0
    for n in range(1, nmax + 1):
        for l in range(lmax + 1):
            idx = QuantumIndex(n, l)
            for q in range(qmax + 1):
                for lam in j_grid_rates(n):
                    for x in J_RADII:
                        o = oracle_j(idx, lam, x, q)
                        v = float(j_mom(idx, lam, x, q).value)
                        worst = max(worst, abs(v - o.value) / max(abs(o.value), floor / tol))
                        rows += 1
    return {"suite": "oracle-j", "cases": rows, "max_rel_dev": worst, "ok": worst <= tol}


ODE_CASES = [(1, 0), (2, 0), (2, 1), (3, 1), (1, 2), (2, 4)]


def verify_ode(h=1e-3, tol=1e-5):
    from .oracle import ode_residual
    worst = 0.0
    for n, l in ODE_CASES:
        res = ode_residual(QuantumIndex(n, l), 1, [2, 3.5, 0.5], h)
        worst = max(worst, max(abs(r) for r in res))
    return {"suite": "ode", "cases": len(ODE_CASES), "max_residual": worst, "ok": worst <= tol}


CONTINUITY_CASES = [(1, 0, 0), (2, 0, 1), (2, 1, 0), (3, 1, 2), (1, 2, 1), (2, 4, 3)]


def continuity_deviation(n, l, q, eps=Fraction(1, 10 ** 6)):
    idx = QuantumIndex(n, l)
    lam = Fraction(1, n)
    k0 = k_gen(idx, lam, 1, q, 0).value
    j0 = j_mom(idx, lam, 2, q).value
    dev = 0.0
    for s in (eps, -eps):
        dev = max(dev, float(abs(k_gen(idx, lam + s, 1, q, 0).value - k0) / abs(k0)),
                  float(abs(j_mom(idx, lam + s, 2, q).value - j0) / abs(j0)))
    return dev


def verify_continuity(tol=1e-4):
    worst = max(continuity_deviation(*c) for c in CONTINUITY_CASES)
    return {"suite": "continuity", "cases": len(CONTINUITY_CASES), "max_rel_dev": worst,
            "ok": worst <= tol}


def _verify(args):
    suite = args.suite
    if suite == "identities":
        rep = verify_identities(args.nmax or 10)
    elif suite == "oracle-k":
        rep = verify_oracle_k(args.nmax or 6, args.lmax)
    elif suite == "oracle-j":
        rep = verify_oracle_j(args.nmax or 6, args.lmax)
    elif suite == "ode":
        rep = verify_ode()
    else:
        rep = verify_continuity()
    json.dump(rep, sys.stdout, indent=2, default=str)
    sys.stdout.write("\n")
    return 0 if rep["ok"] else 1


# --- bench -----------------------------------------------------------------

TABLE1_ROWS = [(3, 1, 2, 0), (7, 5, 4, 1), (16, 15, 10, 10), (37, 1, 1, 0)]
TABLE2_ROWS = [(1, 0, 0), (2, 4, 3), (5, 4, 7), (6, 8, 8)]


def batch_cases():
    lams = [Fraction(1), Fraction(3, 2), Fraction(2)]
    return [(n, l, q, lam) for n in (2, 3, 4) for l in (0, 1, 2) for q in (0, 1, 2) for lam in lams]


def bench_table1(with_oracle=True):
    from .oracle import QuadratureSpec, oracle_k
    rows = []
    for n, l, q, qp in TABLE1_ROWS:
        idx = QuantumIndex(n, l)
        r = k_gen(idx, 1, 1, q, qp)
        t = time.perf_counter_ns()
        try:
            o = oracle_k(idx, 1, 1, q, qp, QuadratureSpec(max_subdivisions=20)).value if with_oracle else float("nan")
        except (ToleranceError, FloatingPointError, ValueError):
            o = float("nan")
        rows.append({"n": n, "l": l, "q": q, "qp": qp, "value": float(r.value),
                     "analytic_ns": r.wall_time_ns, "oracle": o,
                     "oracle_ns": time.perf_counter_ns() - t if with_oracle else 0})
    return rows


def bench_table2(npoints=100):
    rows = []
    xs = [Fraction(k, 5) for k in range(1, npoints + 1)]
    for n, l, q in TABLE2_ROWS:
        idx = QuantumIndex(n, l)
        t = time.perf_counter_ns()
        for x in xs:
            j_mom(idx, Fraction(37, 100), x, q)
        rows.append({"n": n, "l": l, "q": q, "lam": "0.37", "points": npoints,
                     "analytic_ns": time.perf_counter_ns() - t})
    return rows


def bench_batch():
    out = []
    for n, l, q, lam in batch_cases():
        out.append(k_gen(QuantumIndex(n, l), lam, lam, q, q))
    for n, l, q, lam in batch_cases():
        out.append(j_mom(QuantumIndex(n, l), lam, 1, q))
    return out


def _bench(args):
    if args.case == "grid":
        res = bench_batch()
        _emit(res, "csv")
        total = sum(r.wall_time_ns for r in res) / 1e9
        print(f"# total {total:.3f} s", file=sys.stderr)
        return 0
    rows = bench_table1(not args.no_oracle) if args.case == "table1" else bench_table2()
    w = csv.DictWriter(sys.stdout, list(rows[0]), lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="coulgreen", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision", type=int, default=None, help="working digits")
    common.add_argument("--tol", type=float, default=None, help="target relative error")
    common.add_argument("--format", choices=["json", "csv"], default="json")
    common.add_argument("--jobs", type=int, default=1)
    sub = p.add_subparsers(dest="cmd", required=True)

    def state(sp, z=True):
        sp.add_argument("--n", type=int, required=True)
        sp.add_argument("--l", type=int, required=True)
        if z:
            sp.add_argument("--Z", default="1")

    g = sub.add_parser("green", parents=[common], help="Green's function G(r, r')")
    state(g)
    g.add_argument("--r", required=True)
    g.add_argument("--rp", required=True)
    g.set_defaults(fn=_green)

    k = sub.add_parser("kgen", parents=[common], help="generating integral K")
    state(k)
    k.add_argument("--q", type=int, default=0)
    k.add_argument("--qp", type=int, default=0)
    k.add_argument("--beta", default="1")
    k.add_argument("--betap", default="1")
    k.set_defaults(fn=_kgen)

    j = sub.add_parser("jmom", parents=[common], help="integral moment J at one or more radii")
    state(j)
    j.add_argument("--q", type=int, default=0)
    j.add_argument("--beta", default="1")
    j.add_argument("--x", nargs="+", required=True, help="radii r")
    j.set_defaults(fn=_jmom)

    v = sub.add_parser("verify", parents=[common], help="run a verification suite")
    v.add_argument("--suite", required=True,
                   choices=["identities", "oracle-k", "oracle-j", "ode", "continuity"])
    v.add_argument("--nmax", type=int, default=None)
    v.add_argument("--lmax", type=int, default=7)
    v.set_defaults(fn=_verify, raw=True)

    b = sub.add_parser("bench", parents=[common], help="timing tables as CSV")
    b.add_argument("--case", required=True, choices=["table1", "table2", "grid"])
    b.add_argument("--no-oracle", action="store_true")
    b.set_defaults(fn=_bench, raw=True)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if getattr(args, "raw", False):
            return args.fn(args)
        with mp.workdps(max(mp.mp.dps, 34)):
            res = args.fn(args)
            _emit(res, args.format)
        return 0
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ToleranceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
