"""Command-line front end: ``hurwitz <subcommand>``.

Exit status: 0 all certificates pass, 1 a certificate failed, 2 usage error,
3 budget exceeded.  Reports go to standard output, diagnostics to standard
error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone

from . import kcomplex as K
from .braids import BudgetExceeded, DEFAULT_BUDGET, enumerate_orbits, predicted_component_count
from .fuks import CACHE_ENV, CellFilter, FuksComplex, chain_map_failures, conf_pullback, costabilize
from .groups import (AbelianShape, ConjClass, GroupError, identity_class, order_two_class,
                     parse_group_spec, trivial_group)
from .linalg import DifferentialError
from .stable import (Setting, braid_move_identity, certify_annihilation_implies_zero,
                     certify_cyclic_monodromy, certify_theorem, certify_trivial_action,
                     components_vs_h0, parity_of, stable_table)

SCHEMA = 1
CELL_BYTES = 256


class UsageError(Exception):
    pass


# -- configuration ----------------------------------------------------------

def load_group(spec: str, cls: str | None = None):
    G = parse_group_spec(spec)
    if cls in (None, "auto"):
        c = identity_class(G) if G.order == 1 else order_two_class(G)
    elif cls == "involutions":
        c = order_two_class(G)
    elif cls.startswith("of:"):
        x = element(G, cls[3:])
        c = ConjClass(G, tuple(sorted({G.conjugate(x, h) for h in range(G.order)})))
    else:
        raise UsageError(f"unknown class selector {cls!r}")
    return G, c


def element(G, text: str) -> int:
    if text.lstrip("-").isdigit():
        x = int(text)
        if not 0 <= x < G.order:
            raise UsageError(f"element index {x} out of range")
        return x
    if G.labels and text in G.labels:
        return G.labels.index(text)
    raise UsageError(f"unknown group element {text!r}")


def abelian_shape(spec: str):
    kind, _, arg = spec.partition(":")
    if kind == "dihedral":
        return AbelianShape((int(arg),))
    if kind == "semidirect":
        return AbelianShape(tuple(int(d) for d in arg.split("x")))
    return None


def fuks_budget_check(cx: FuksComplex, budget: int) -> None:
    need = CELL_BYTES * sum(cx.dim(i) for i in cx.degrees)
    if need > budget:
        raise BudgetExceeded(f"Fuks complex at level {cx.n} needs ~{need} bytes, budget is {budget}")


def _budget_guard(budget: int) -> None:
    if budget < 1:
        raise UsageError("budget must be positive")


# -- tasks (top-level so they pickle) ----------------------------------------

def task_components(spec, cls, n_max, budget, restriction="generating"):
    G, c = load_group(spec, cls)
    shape = abelian_shape(spec)
    rows = []
    counts: dict = {}
    for n in range(1, n_max + 1):
        table = enumerate_orbits(G, c, n, restriction, budget)
        for g in range(G.order):
            k = len(table.orbits_with_monodromy(g))
            counts.setdefault(g, {})[n] = k
        rows.append({"n": n, "orbits": table.count,
                     "by_monodromy": {G.label(g): counts[g][n] for g in range(G.order) if counts[g][n]}})
    onsets, ok = {}, True
    if shape is not None and restriction == "generating":
        for g in range(G.order):
            parity = int(g >= shape.order)
            pred = {n: predicted_component_count(shape, G, n, g) for n in counts[g]}
            matching = [n for n in sorted(counts[g]) if n % 2 == parity]
            onset = empirical_onset({n: counts[g][n] for n in matching}, pred)
            mism = [n for n in counts[g] if n % 2 != parity and counts[g][n]]
            onsets[G.label(g)] = {"onset": onset, "parity_mismatch_nonzero": mism,
                                  "predicted": predicted_component_count(shape, G, parity, g)}
            ok &= not mism and onset is not None
    return {"check": "lemma:component-count", "group": spec, "restriction": restriction, "levels": rows,
            "onsets": onsets, "pass": ok}


def empirical_onset(counts: dict, predicted: dict):
    """Smallest level from which every computed count matches the prediction."""
    onset = None
    for n in sorted(counts, reverse=True):
        if counts[n] != predicted[n]:
            break
        onset = n
    return onset


def task_delta_squared(spec, cls, n_max, budget, filters=None):
    G, c = load_group(spec, cls)
    report = []
    ok = True
    for n in range(1, n_max + 1):
        for filt in filters or all_filters(G, c, n):
            cx = FuksComplex(G, c, n, filt)
            fuks_budget_check(cx, budget)
            try:
                cx.based_complex().check_d_squared()
                good = True
            except DifferentialError as exc:
                good = False
                print(f"d^2 != 0: level {n} filter {filt.key}: {exc}", file=sys.stderr)
            ok &= good
            report.append({"n": n, "filter": filt.key, "dims": [cx.dim(i) for i in cx.degrees],
                           "pass": good})
    return {"check": "delta-squared", "complexes": report, "pass": ok}


def all_filters(G, c, n):
    out = [CellFilter.all(), CellFilter(True)]
    monos = sorted({G.mul(*t) for t in _some_products(G, c, n)})
    out += [CellFilter.component(g) for g in monos]
    out += [CellFilter.with_adjoined((g,), m) for g in c for m in monos]
    return out


def _some_products(G, c, n):
    reach = {G.identity}
    for _ in range(n):
        reach = {G.mult[x][h] for x in reach for h in c}
    return [(x,) for x in reach]


def task_trivial_group(n_max):
    T = trivial_group()
    e = identity_class(T)
    rows, ok = [], True
    for n in range(1, n_max + 1):
        cx = FuksComplex(T, e, n)
        dims = [cx.betti(i) for i in cx.degrees]
        expect = [1] + ([1] if n >= 2 else []) + [0] * (n - 2)
        rows.append({"n": n, "dims": dims, "pass": dims == expect})
        ok &= dims == expect
    return {"check": "configuration-space-cohomology", "levels": rows, "pass": ok}


def task_chain_maps(spec, cls, n_max):
    G, c = load_group(spec, cls)
    T = trivial_group()
    rows, ok = [], True
    for n in range(2, n_max + 1):
        src, tgt = FuksComplex(G, c, n), FuksComplex(G, c, n - 1)
        cost = {G.label(g): chain_map_failures(lambda x, g=g: costabilize(x, g), src, tgt) for g in c}
        conf = FuksComplex(T, identity_class(T), n)
        pull = chain_map_failures(lambda x: conf_pullback(x, src), conf, src)
        good = not pull and not any(cost.values())
        ok &= good
        rows.append({"n": n, "costabilize_failures": cost, "pullback_failures": pull, "pass": good})
    return {"check": "chain-maps", "levels": rows, "pass": ok}


def task_kcomplex(spec, cls, which, g, window, z=0):
    G, c = load_group(spec, cls)
    L = window
    runs = {
        "one-sided": lambda: K.certify_one_sided(G, c, g, max_letters=L, z=z),
        "two-sided": lambda: K.certify_two_sided(G, c, g, max_letters=min(L, 5), z=z),
        "T-exact": lambda: K.certify_T_exact(G, c, g, max_letters=min(L, 5), zs=(z - 1, z, z + 1)),
        "Dx": lambda: K.certify_Dx(G, c, g, xs=tuple(range(0, -min(L, 4) - 1, -1))),
        "S0": lambda: _both_S0(G, c, g, min(L, 5), z),
        "sigma": lambda: K.certify_sigma(G, c, g, max_letters=L, z=z),
        "bianchi": lambda: K.certify_bianchi(G, c, g, max_letters=L, z=z),
        "two-sided-g": lambda: K.certify_two_sided_g(G, c, g, depth=min(L, 5), zs=(z - 1, z, z + 1)),
    }
    if which not in runs:
        raise UsageError(f"unknown certificate {which!r}")
    out = runs[which]()
    out["check"] = KCHECKS[which]
    return out


KCHECKS = {
    "one-sided": "lemma:laurent-k-complex-exact",
    "two-sided": "definition:two-sided-k-complex-differential",
    "T-exact": "lemma:nullhomotopy-T-exact",
    "Dx": "proposition:upper-triangle-exact",
    "S0": "lemma:zero-and-iso-vanishes",
    "sigma": "lemma:nullhomotopy",
    "bianchi": "remark:alternate-homotopy",
    "two-sided-g": "theorem:two-sided-g",
}


def _both_S0(G, c, g, L, z):
    a = K.certify_S0(G, c, g, max_letters=L, z=z, twisted=True)
    b = K.certify_S0(G, c, g, max_letters=L, z=z, twisted=False)
    return {"which": "S0", "twisted": a, "untwisted": b, "pass": a["pass"] and b["pass"]}


def task_theorem(spec, cls, g, i_max, n_max, cache, n_max_by_degree=None):
    G, c = load_group(spec, cls)
    S = Setting(G, c, cache)
    return certify_theorem(S, g, i_max, n_max, n_max_by_degree)


def task_lemmas(spec, cls, g, n_max, cache, i_max=1):
    """Kernel lemmas at every computed level inside the empirical stable range of its degree."""
    G, c = load_group(spec, cls)
    S = Setting(G, c, cache)
    table = stable_table(S, g, i_max, n_max, ranks=False)
    results, ok = [], True
    for i in table.degrees():
        onset = table.onset(i)
        for n in table.levels():
            if (n, i) not in table.cells or onset is None or n < onset:
                continue
            for h in c:
                if h != g and n + 1 <= n_max:
                    r = certify_trivial_action(S, g, h, i, n)
                    results.append(r)
                    ok &= r["pass"]
            if n + 4 <= n_max or S.kernel_dim(n, g, i) == 0:
                r = _annihilation(S, g, i, n, n_max)
                results.append(r)
                ok &= r["pass"]
        skipped = [n for n in table.levels() if (n, i) in table.cells and (onset is None or n < onset)]
        results.append({"check": "stable-range", "i": i, "onset": onset, "outside_range": skipped})
    zetas = [x for x in range(G.order) if x != G.identity and x not in c
             and G.element_order(x) == G.order // 2]
    for zeta in zetas[:1]:
        zt = stable_table(S, zeta, i_max, n_max, ranks=False)
        for i in zt.degrees():
            onset = zt.onset(i)
            for n in zt.levels():
                if (n, i) in zt.cells and onset is not None and n >= onset:
                    r = certify_cyclic_monodromy(S, zeta, i, n)
                    results.append(r)
                    ok &= r["pass"]
    return {"check": "kernel-lemmas", "g": g, "results": results, "pass": ok}


def _annihilation(S, g, i, n, n_max):
    if S.kernel_dim(n, g, i) == 0:
        return {"check": "proposition:annihilated-class-vanishes", "n": n, "i": i,
                "pullback_kernel": 0, "kernel_by_w": {}, "pass": True}
    return certify_annihilation_implies_zero(S, g, i, n, w_max=min(3, n_max - n - 1))


def task_braid_moves(spec, cls, g, n_max, cache, i_max=1, j_max=2):
    G, c = load_group(spec, cls)
    S = Setting(G, c, cache)
    parity = parity_of(G, c, g)
    results, ok = [], True
    for j in range(1, j_max + 1):
        for n in range(1, n_max - j):
            if parity is not None and n % 2 != parity:
                continue
            for i in range(0, min(i_max, n - 1) + 1):
                for h in c:
                    if h == g:
                        continue
                    r = braid_move_identity(S, g, h, j, i, n)
                    results.append(r)
                    ok &= r["pass"]
    return {"check": "identity:braid-move-on-costabilization", "results": results, "pass": ok}


def task_fuks_report(spec, cls, n, filt, report, budget, cache):
    G, c = load_group(spec, cls)
    cx = FuksComplex(G, c, n, filt, cache)
    fuks_budget_check(cx, budget)
    if report == "certify-delta-squared":
        try:
            cx.based_complex().check_d_squared()
            good = True
        except DifferentialError:
            good = False
        return {"check": "delta-squared", "n": n, "filter": filt.key, "pass": good}
    return {"check": "fuks-cohomology", "n": n, "filter": filt.key,
            "dims": {i: cx.dim(i) for i in cx.degrees},
            "homology": {i: cx.betti(i) for i in cx.degrees}, "pass": True}


# -- running ----------------------------------------------------------------

def _call(job):
    fn, args = job
    return fn(*args)


def run_jobs(jobs, n_workers: int):
    if n_workers <= 1 or len(jobs) <= 1:
        return [_call(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=n_workers) as pool:
        return list(pool.map(_call, jobs))


def envelope(command: str, args: dict, results, ok: bool) -> dict:
    return {"schema": SCHEMA, "command": command, "args": args, "results": results, "pass": ok,
            "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds")}


def emit(report: dict, fmt: str, stream=None) -> None:
    stream = stream or sys.stdout
    if fmt == "json":
        stream.write(json.dumps(report, sort_keys=True, indent=2, default=str) + "\n")
    elif fmt == "csv":
        stream.write(to_csv(report))
    else:
        stream.write(to_text(report))


def to_csv(report: dict) -> str:
    buf = io.StringIO()
    rows = _table_rows(report)
    if rows:
        keys = sorted({k for r in rows for k in r})
        w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow(r)
    return buf.getvalue()


def _table_rows(report):
    res = report.get("results")
    if isinstance(res, dict) and "table" in res:
        return res["table"]["cells"]
    if isinstance(res, dict) and "levels" in res:
        return [{k: (json.dumps(v, sort_keys=True) if isinstance(v, (dict, list)) else v)
                 for k, v in r.items()} for r in res["levels"]]
    if isinstance(res, list):
        return [{"check": r.get("check", r.get("which")), "pass": r.get("pass")} for r in res]
    return [{"check": report["command"], "pass": report["pass"]}]


def to_text(report: dict) -> str:
    lines = [f"{report['command']}: {'PASS' if report['pass'] else 'FAIL'}"]
    res = report.get("results")
    if isinstance(res, list):
        for r in res:
            name = r.get("check") or r.get("which")
            lines.append(f"  {'PASS' if r.get('pass') else 'FAIL'}  {name}")
    elif isinstance(res, dict):
        for r in _table_rows(report):
            lines.append("  " + ", ".join(f"{k}={r[k]}" for k in sorted(r)))
    return "\n".join(lines) + "\n"


# -- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hurwitz", description="Exact computations on Hurwitz spaces.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, fmt=("json", "csv", "text")):
        sp.add_argument("--group", required=True, help="dihedral:<l>, semidirect:<d1>x<d2>, table:<path>, trivial")
        sp.add_argument("--class", dest="cls", default="auto", help="auto, involutions or of:<element>")
        sp.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="memory budget in bytes")
        sp.add_argument("--jobs", type=int, default=1)
        sp.add_argument("--cache", default=os.environ.get(CACHE_ENV))
        sp.add_argument("--format", choices=fmt, default="json")

    sp = sub.add_parser("components", help="braid orbit counts per boundary monodromy")
    common(sp)
    sp.add_argument("--n-max", type=int, required=True)
    sp.add_argument("--restriction", choices=("all", "generating"), default="generating")

    sp = sub.add_parser("fuks", help="Fuks complex homology or d^2 certificate")
    common(sp)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--filter", default="all", help="all, generating, monodromy:<g>, adjoined:<g>[:<m>]")
    sp.add_argument("--report", choices=("homology", "certify-delta-squared"), default="homology")

    sp = sub.add_parser("kcomplex", help="K-complex certificates")
    sp.add_argument("action", choices=("verify",))
    common(sp)
    sp.add_argument("--which", required=True, choices=sorted(KCHECKS))
    sp.add_argument("--g", default=None, help="class element (index or label)")
    sp.add_argument("--window", type=int, default=5, help="maximum letter count")
    sp.add_argument("--z", type=int, default=0)

    sp = sub.add_parser("stable-table", help="cohomology of a component against configuration space")
    common(sp)
    sp.add_argument("--monodromy", required=True)
    sp.add_argument("--i-max", type=int, default=2)
    sp.add_argument("--n-max", type=int, required=True)

    sp = sub.add_parser("certify-all", help="every certificate at desk scale")
    common(sp)
    sp.add_argument("--n-max", type=int, default=6)
    return p


def _check_bounds(args):
    for name in ("n_max", "n", "window", "i_max"):
        v = getattr(args, name, None)
        if v is not None and v < 0:
            raise UsageError(f"--{name.replace('_', '-')} must be nonnegative")
    if args.jobs < 1:
        raise UsageError("--jobs must be positive")
    _budget_guard(args.budget)


def dispatch(argv=None) -> tuple[int, dict | None]:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return (0 if exc.code == 0 else 2), None
    try:
        _check_bounds(args)
        report = _run(args)
    except (UsageError, GroupError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2, None
    except (BudgetExceeded, MemoryError) as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return 3, None
    return (0 if report["pass"] else 1), report


def _run(args) -> dict:
    spec, cls = args.group, args.cls
    G, c = load_group(spec, cls)
    cmd = args.command
    if cmd == "components":
        res = task_components(spec, cls, args.n_max, args.budget, args.restriction)
        return envelope(cmd, {"group": spec, "n_max": args.n_max}, res, res["pass"])
    if cmd == "fuks":
        try:
            filt = CellFilter.parse(args.filter)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        res = task_fuks_report(spec, cls, args.n, filt, args.report, args.budget, args.cache)
        return envelope(cmd, {"group": spec, "n": args.n, "filter": args.filter}, res, res["pass"])
    if cmd == "kcomplex":
        g = element(G, args.g) if args.g is not None else c.members[0]
        if g not in c:
            raise UsageError("--g must lie in the class")
        res = task_kcomplex(spec, cls, args.which, g, args.window, args.z)
        return envelope(cmd, {"group": spec, "which": args.which, "g": g, "window": args.window},
                        res, res["pass"])
    if cmd == "stable-table":
        g = element(G, args.monodromy)
        _table_budget(G, c, args.n_max, args.budget)
        res = task_theorem(spec, cls, g, args.i_max, args.n_max, args.cache)
        return envelope(cmd, {"group": spec, "monodromy": g, "i_max": args.i_max,
                              "n_max": args.n_max}, res, res["pass"])
    if cmd == "certify-all":
        return _certify_all(args, G, c)
    raise UsageError(f"unknown command {cmd}")


def _table_budget(G, c, n_max, budget):
    need = CELL_BYTES * len(c) ** n_max * max(n_max, 1)
    if need > budget:
        raise BudgetExceeded(f"level {n_max} needs ~{need} bytes, budget is {budget}")


def _certify_all(args, G, c) -> dict:
    spec, cls, n = args.group, args.cls, args.n_max
    _table_budget(G, c, n, args.budget)
    g = c.members[0]
    parity = parity_of(G, c, g)
    jobs = [
        (task_delta_squared, (spec, cls, n, args.budget)),
        (task_trivial_group, (max(n, 2),)),
        (task_chain_maps, (spec, cls, n)),
        (task_components, (spec, cls, n, args.budget)),
    ]
    if G.order > 1:
        for which in ("one-sided", "two-sided", "S0", "sigma", "bianchi", "Dx", "T-exact", "two-sided-g"):
            jobs.append((task_kcomplex, (spec, cls, which, g, n)))
        top = n if parity is None or n % 2 == parity else n - 1
        jobs += [
            (task_theorem, (spec, cls, g, 2, top, args.cache)),
            (task_lemmas, (spec, cls, g, n, args.cache)),
            (task_braid_moves, (spec, cls, g, n, args.cache)),
        ]
    results = run_jobs(jobs, args.jobs)
    for r in results:
        if not r["pass"]:
            print(f"certificate failed: {r.get('check')}", file=sys.stderr)
    return envelope("certify-all", {"group": spec, "n_max": n}, results, all(r["pass"] for r in results))


def main(argv=None) -> int:
    code, report = dispatch(argv)
    if report is not None:
        fmt = "json"
        try:
            fmt = build_parser().parse_args(argv).format
        except SystemExit:
            pass
        emit(report, fmt)
    return code


if __name__ == "__main__":
    sys.exit(main())
