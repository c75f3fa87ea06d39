"""Command-line front end: ``ramanujan-pi <command> [options]``.

Every command prints one PASS/FAIL line per check followed by a summary, and
can write a JSON report (schema in data/report.schema.json).  Exit codes:
0 all checks pass, 1 some check failed, 2 usage error, 3 catalog error.
"""

from __future__ import annotations

import argparse
import functools
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Optional

import mpmath

from . import congruence, discovery, hyperseries, modular, taylor
from .catalog import CatalogError, CMPoint, coding_from_text, default_catalog_path, get, load_catalog, validate_formula

DEFAULT_PRECISION = 256
MIN_VERIFY_PRECISION = 50
REPORT_SCHEMA_VERSION = 1

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CATALOG = 0, 1, 2, 3

#: non-CM points used by ``modular --identities``, valid for all four levels
GENERIC_POINTS = ((0.2, 1.6), (-0.31, 1.55), (0.45, 1.7))
#: catalog rows rediscovered by ``discover`` when no explicit parameters are given
DISCOVERY_ROWS = (("pi", 33), ("pi", 34), ("pi", 35), ("pi", 36), ("pi", 30), ("pi", 12),
                  ("pic", 1), ("pic", 4), ("pic", 11))


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    precision: int = DEFAULT_PRECISION
    prime_min: int = 5
    prime_max: int = 97
    family: str = "pi"
    rows: Optional[set] = None  # None = all
    catalog_path: Optional[str] = None
    json_path: Optional[str] = None
    jobs: int = 1
    options: dict = field(default_factory=dict)


def report_schema() -> dict:
    return json.loads((resources.files("ramanujan_pi") / "data" / "report.schema.json").read_text())


# ---------------------------------------------------------------------------
# argument parsing


def parse_rows(text: str) -> Optional[set]:
    """``all``, ``7``, ``1-36`` or comma-separated mixtures."""
    if text.strip().lower() == "all":
        return None
    out = set()
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        lo, sep, hi = part.partition("-")
        try:
            if sep:
                a, b = int(lo), int(hi)
                if a > b:
                    raise UsageError(f"empty row range {part!r}")
                out.update(range(a, b + 1))
            else:
                out.add(int(part))
        except ValueError:
            raise UsageError(f"bad row specification {part!r}") from None
    if not out:
        raise UsageError("no rows selected")
    return out


def parse_primes(text: str) -> tuple:
    """``5..97`` or ``5-97``."""
    for sep in ("..", "-"):
        if sep in text:
            lo, _, hi = text.partition(sep)
            break
    else:
        lo = hi = text
    try:
        lo, hi = int(lo), int(hi)
    except ValueError:
        raise UsageError(f"bad prime range {text!r}") from None
    if lo < 5 or hi < lo:
        raise UsageError(f"prime range must satisfy 5 <= min <= max, got {text!r}")
    return lo, hi


def default_precision() -> int:
    raw = os.environ.get("RPL_PRECISION")
    if raw is None or not raw.strip():
        return DEFAULT_PRECISION
    try:
        value = int(raw)
    except ValueError:
        raise UsageError(f"RPL_PRECISION must be an integer, got {raw!r}") from None
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ramanujan-pi",
                                     description="Verify and rediscover rational hypergeometric 1/pi^c formulas.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision", type=int, default=None,
                        help=f"decimal digits (default $RPL_PRECISION or {DEFAULT_PRECISION})")
    common.add_argument("--rows", default="all", help="row ids: all, 7, 1-36, 1,5,9 (default all)")
    common.add_argument("--family", choices=("pi", "pic", "all"), default="pi",
                        help="pi: the 1/pi table; pic: the 1/pi^c table (default pi)")
    common.add_argument("--catalog", default=None, help="catalog JSON file (default: bundled)")
    common.add_argument("--json", dest="json_path", default=None, help="write a JSON report here ('-' for stdout)")
    common.add_argument("--jobs", type=int, default=1, help="worker processes (default 1)")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("verify", parents=[common], help="sum convergent rows and compare with sign*sqrt(k)/pi^c") \
        .add_argument("--cubics", action="store_true", help="also check the three cubic-P variants")
    sub.add_parser("taylor", parents=[common], help="Taylor coefficients of S(H,a,P;x) at x=0")
    sub.add_parser("half", parents=[common], help="closed forms of S(H,a,P;1/2)")
    cong = sub.add_parser("congruence", parents=[common], help="supercongruences of the truncated sums")
    cong.add_argument("--primes", default="5..97", help="prime range (default 5..97)")
    cong.add_argument("--plain", action="store_true", help="only the mod p^(2c+1) congruence")
    sub.add_parser("updown", parents=[common], help="upside-down series against A*L(D,c+1)")
    mod = sub.add_parser("modular", parents=[common], help="CM specialization and the modular identity")
    mod.add_argument("--identities", action="store_true",
                     help="also run non-CM points, derivative identities and modularity checks")
    sub.add_parser("beta", parents=[common], help="the four beta-value formulas")
    disc = sub.add_parser("discover", parents=[common], help="rediscover (P, k) by integer relations")
    disc.add_argument("--H", dest="h_coding", default=None, help="H coding, e.g. 2^3 or 2.6")
    disc.add_argument("--a", dest="a", default=None, help="series argument, e.g. 64 or -512/27")
    disc.add_argument("--c", dest="c", type=int, default=1, help="power of pi (default 1)")
    disc.add_argument("--deg", dest="deg", type=int, default=None, help="degree of P (default (deg H - 1)/2)")
    sub.add_parser("validate-catalog", parents=[common], help="schema and invariant checks of a catalog file")
    return parser


def config_from_args(args) -> RunConfig:
    precision = args.precision if args.precision is not None else default_precision()
    if precision < 30:
        raise UsageError("precision must be at least 30 digits")
    if args.command == "verify" and precision < MIN_VERIFY_PRECISION:
        raise UsageError(f"verify needs precision >= {MIN_VERIFY_PRECISION}")
    if args.jobs < 1:
        raise UsageError("--jobs must be positive")
    cfg = RunConfig(args.command, precision, family=args.family, rows=parse_rows(args.rows),
                    catalog_path=args.catalog, json_path=args.json_path, jobs=args.jobs)
    if args.command == "congruence":
        cfg.prime_min, cfg.prime_max = parse_primes(args.primes)
        cfg.options["refined"] = not args.plain
    elif args.command == "verify":
        cfg.options["cubics"] = args.cubics
    elif args.command == "modular":
        cfg.options["identities"] = args.identities
    elif args.command == "discover":
        cfg.options.update(H=args.h_coding, a=args.a, c=args.c, deg=args.deg)
        if (args.h_coding is None) != (args.a is None):
            raise UsageError("discover needs both --H and --a, or neither")
    return cfg


# ---------------------------------------------------------------------------
# tasks (run in worker processes; everything here must be picklable)


@functools.lru_cache(maxsize=4)
def _catalog(path):
    return load_catalog(path, validate=False)


def _result(check: str, name: str, passed: bool, line: str, seconds: float, data: dict) -> dict:
    return {"check": check, "name": name, "passed": bool(passed), "line": line,
            "seconds": round(seconds, 3), "data": data}


def run_task(task: tuple) -> dict:
    kind, key, prec, path, opts = task
    start = time.perf_counter()
    fn = _TASKS[kind]
    return fn(key, prec, path, opts, start)


def _row(path, key):
    family, ident = key
    return get(_catalog(path), family, ident)


def _task_verify(key, prec, path, opts, start):
    f = _row(path, key)
    rep = hyperseries.verify_formula(f, prec)
    return _result("verify", f.label, rep.passed, rep.line(), time.perf_counter() - start, rep.to_dict())


def _task_cubic(key, prec, path, opts, start):
    rep = [r for r in hyperseries.verify_equivalent_cubics(prec) if r.name == key][0]
    return _result("verify", rep.name, rep.passed, rep.line(), time.perf_counter() - start, rep.to_dict())


def _task_taylor(key, prec, path, opts, start):
    f = _row(path, key)
    rep = taylor.match_taylor_row(f, prec)
    return _result("taylor", f.label, rep.passed, rep.line(), time.perf_counter() - start, rep.to_dict())


def _task_half(key, prec, path, opts, start):
    f = _row(path, key)
    rep = taylor.half_value(f, prec)
    return _result("half", f.label, rep.passed, rep.line(), time.perf_counter() - start, rep.to_dict())


def _task_congruence(key, prec, path, opts, start):
    f = _row(path, key)
    lo, hi = opts["primes"]
    primes = [p for p in range(lo, hi + 1) if congruence.is_prime(p)]
    rep = congruence.verify_super(f, primes, opts["refined"])
    return _result("congruence", f.label, rep.passed, rep.line(), time.perf_counter() - start, rep.to_dict())


def _task_updown(key, prec, path, opts, start):
    f = _row(path, key)
    rep = hyperseries.evaluate_updown(f, prec)
    return _result("updown", f.label, rep.passed, rep.line(), time.perf_counter() - start, rep.to_dict())


def _task_cm(key, prec, path, opts, start):
    f = _row(path, key)
    res = modular.cm_specialize(f.level, f.tau, prec)
    a, P, k, sign = f.cm_expected()
    got = None if res is None else (res.a, res.P, res.k, res.sign)
    ok = got == (a, P, k, sign)
    note = ""
    if ok and f.modular_errata:
        note = f" (printed k = {f.k}, sign = {f.sign_rhs:+d}; catalogued correction applies)"
    text = "none" if res is None else f"a = {res.a}, P = {list(res.P)}, k = {res.k}, sign = {res.sign:+d}"
    line = f"{'PASS' if ok else 'FAIL'} {f.label} cm_specialize: {text}{note}"
    data = {"result": None if res is None else res.to_dict(),
            "expected": {"a": str(a), "P": list(P), "k": str(k), "sign": sign}}
    return _result("cm_specialize", f.label, ok, line, time.perf_counter() - start, data)


def _task_prop1(key, prec, path, opts, start):
    """key is ("row", (family, id)), ("cm", spec, (u, v, disc)) or ("point", spec, (re, im))."""
    if key[0] == "row":
        f = _row(path, key[1])
        spec, tau = f.level, f.tau
    elif key[0] == "cm":
        spec, tau = key[1], CMPoint(*key[2])
    else:
        spec, tau = key[1], mpmath.mpc(*key[2])
    rep = modular.verify_prop1(spec, tau, prec)
    return _result("prop1", f"{spec} {rep.tau}", rep.passed, rep.line(), time.perf_counter() - start, rep.to_dict())


def _task_identities(key, prec, path, opts, start):
    tau = mpmath.mpc(*key)
    d = modular.derivative_identities(tau, prec)
    m = modular.modularity_residuals(tau, prec)
    with mpmath.workdps(prec):
        ok_d = all(v < mpmath.mpf(10) ** (-(prec // 2)) for v in d.values())
        ok_m = all(v < mpmath.mpf(10) ** (-(prec - 20)) for v in m.values())
    vals = {**{f"D({k})": mpmath.nstr(v, 3) for k, v in d.items()}, **{f"J({k})": mpmath.nstr(v, 3) for k, v in m.items()}}
    text = ", ".join(f"{k} {v}" for k, v in vals.items())
    line = f"{'PASS' if ok_d and ok_m else 'FAIL'} identities tau={key}: {text}"
    return _result("identities", f"tau={key}", ok_d and ok_m, line, time.perf_counter() - start, vals)


def _task_beta(key, prec, path, opts, start):
    rep = [r for r in hyperseries.verify_beta_formulas(prec) if r.name == key][0]
    return _result("beta", rep.name, rep.passed, rep.line(), time.perf_counter() - start, rep.to_dict())


def _found_line(label, found, expected=None):
    if found is None:
        ok = expected is None
        return ok, f"{'PASS' if ok else 'FAIL'} {label} discover: no relation"
    text = f"P = {list(found.P)}, k = {found.k}, sign = {found.sign:+d}, s = {found.s}"
    ok = expected is None or (found.P, found.k, found.sign) == expected
    return ok, f"{'PASS' if ok else 'FAIL'} {label} discover: {text}"


def _task_discover(key, prec, path, opts, start):
    if key[0] == "row":
        f = _row(path, key[1])
        found = discovery.find_formula(f.H, f.a, f.c, f.deg_P, prec)
        ok, line = _found_line(f.label, found, (f.P, f.k, f.sign_rhs))
        name = f.label
    else:
        _, coding, a, c, deg = key
        H = coding_from_text(coding)
        found = discovery.find_formula(H, Fraction(a), c, deg, prec)
        name = f"H={coding} a={a} c={c}"
        ok = True
        line = _found_line(name, found)[1].replace("FAIL", "PASS", 1)
    data = None if found is None else {"P": list(found.P), "k": str(found.k), "sign": found.sign, "s": found.s,
                                       "residual": mpmath.nstr(found.relation.residual, 5)}
    return _result("discover", name, ok, line, time.perf_counter() - start, {"found": data})


def _task_validate(key, prec, path, opts, start):
    f = _row(path, key)
    rep = validate_formula(f)
    text = "all invariants hold" if rep.ok else "violates " + ", ".join(rep.failures)
    line = f"{'PASS' if rep.ok else 'FAIL'} {f.label} catalog: {text}"
    return _result("validate", f.label, rep.ok, line, time.perf_counter() - start, {"checks": rep.checks})


_TASKS = {
    "verify": _task_verify, "cubic": _task_cubic, "taylor": _task_taylor, "half": _task_half,
    "congruence": _task_congruence, "updown": _task_updown, "cm": _task_cm, "prop1": _task_prop1,
    "identities": _task_identities, "beta": _task_beta, "discover": _task_discover, "validate": _task_validate,
}


# ---------------------------------------------------------------------------
# planning


def _selected(cfg: RunConfig, formulas, predicate) -> list:
    families = ("pi", "pic") if cfg.family == "all" else (cfg.family,)
    rows = [f for f in formulas if f.family in families]
    if cfg.rows is not None:
        known = {f.id for f in rows}
        unknown = sorted(cfg.rows - known)
        if unknown:
            raise UsageError(f"unknown row(s) {unknown} in family {cfg.family}")
        rows = [f for f in rows if f.id in cfg.rows]
    return [f for f in rows if predicate(f)]


def plan(cfg: RunConfig, formulas) -> list:
    """List of task tuples for the configured command."""
    prec, path, cmd = cfg.precision, cfg.catalog_path, cfg.command
    key = lambda f: (f.family, f.id)  # noqa: E731
    tasks = []
    if cmd == "verify":
        tasks = [("verify", key(f), prec, path, {}) for f in _selected(cfg, formulas, lambda f: f.convergent)]
        if cfg.options.get("cubics"):
            tasks += [("cubic", name, prec, path, {}) for name, *_ in hyperseries.EQUIVALENT_CUBICS]
    elif cmd == "taylor":
        tasks = [("taylor", key(f), prec, path, {}) for f in _selected(cfg, formulas, lambda f: f.taylor)]
    elif cmd == "half":
        tasks = [("half", key(f), prec, path, {}) for f in _selected(cfg, formulas, lambda f: f.half_value)]
    elif cmd == "congruence":
        opts = {"primes": (cfg.prime_min, cfg.prime_max), "refined": cfg.options["refined"]}
        tasks = [("congruence", key(f), prec, path, opts) for f in _selected(cfg, formulas, lambda f: True)]
    elif cmd == "updown":
        tasks = [("updown", key(f), prec, path, {}) for f in _selected(cfg, formulas, lambda f: f.updown)]
    elif cmd == "modular":
        rows = _selected(cfg, formulas, lambda f: f.tau is not None)
        tasks = [("cm", key(f), prec, path, {}) for f in rows]
        tasks += [("prop1", ("row", key(f)), prec, path, {}) for f in rows if f.convergent]
        if cfg.options.get("identities"):
            for spec in ("E4_quarter", "E6_sixth"):
                for disc in (-3, -4):
                    tasks.append(("prop1", ("cm", spec, (0, 1, disc)), prec, path, {}))
            for level in (1, 2, 3, 4):
                tasks += [("prop1", ("point", level, pt), prec, path, {}) for pt in GENERIC_POINTS]
            tasks += [("identities", pt, prec, path, {}) for pt in GENERIC_POINTS]
    elif cmd == "beta":
        tasks = [("beta", name, prec, path, {}) for name, *_ in hyperseries.BETA_FORMULAS]
    elif cmd == "discover":
        o = cfg.options
        if o.get("H"):
            try:
                H = coding_from_text(o["H"])
                a = Fraction(o["a"])
            except (ValueError, ZeroDivisionError) as exc:
                raise UsageError(f"bad discover parameters: {exc}") from None
            deg = o["deg"] if o["deg"] is not None else (H.degree - 1) // 2
            if deg >= H.degree or deg < 0:
                raise UsageError("--deg must satisfy 0 <= deg < deg(H)")
            tasks = [("discover", ("params", o["H"], str(a), o["c"], deg), prec, path, {})]
        else:
            rows = _selected(cfg, formulas, lambda f: f.convergent)
            if cfg.rows is None:
                rows = [f for f in rows if (f.family, f.id) in set(DISCOVERY_ROWS)]
            tasks = [("discover", ("row", key(f)), prec, path, {}) for f in rows]
    elif cmd == "validate-catalog":
        tasks = [("validate", key(f), prec, path, {}) for f in _selected(cfg, formulas, lambda f: True)]
    return tasks


def execute(tasks: list, jobs: int) -> list:
    """Run tasks; results come back in task order whatever the parallelism."""
    if jobs <= 1 or len(tasks) <= 1:
        return [run_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as pool:
        return list(pool.map(run_task, tasks))


def build_report(cfg: RunConfig, results: list, seconds: float) -> dict:
    failed = [r["name"] for r in results if not r["passed"]]
    return {
        "schema_version": REPORT_SCHEMA_VERSION,
        "command": cfg.command,
        "precision": cfg.precision,
        "family": cfg.family,
        "results": results,
        "summary": {"total": len(results), "passed": len(results) - len(failed), "failed": failed,
                    "seconds": round(seconds, 3)},
    }


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        cfg = config_from_args(args)
        formulas = load_catalog(cfg.catalog_path, validate=cfg.command != "validate-catalog")
        tasks = plan(cfg, formulas)
    except UsageError as exc:
        print(f"ramanujan-pi: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CatalogError as exc:
        print(f"ramanujan-pi: catalog error: {exc}", file=sys.stderr)
        return EXIT_CATALOG
    if not tasks:
        print(f"ramanujan-pi: error: no checks selected for {cfg.command}", file=sys.stderr)
        return EXIT_USAGE
    start = time.perf_counter()
    results = execute(tasks, cfg.jobs)
    elapsed = time.perf_counter() - start
    report = build_report(cfg, results, elapsed)
    to_stdout_json = cfg.json_path == "-"
    out = sys.stderr if to_stdout_json else sys.stdout
    for r in results:
        print(r["line"], file=out)
    s = report["summary"]
    print(f"{s['passed']}/{s['total']} checks passed in {elapsed:.1f} s", file=out)
    if s["failed"]:
        print("failed: " + ", ".join(s["failed"]), file=out)
    code = EXIT_OK
    if s["failed"]:
        code = EXIT_CATALOG if cfg.command == "validate-catalog" else EXIT_FAIL
    if cfg.json_path:
        text = json.dumps(report, indent=1, default=str)
        if to_stdout_json:
            print(text)
        else:
            with open(cfg.json_path, "w") as fh:
                fh.write(text + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
