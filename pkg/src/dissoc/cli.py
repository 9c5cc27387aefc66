"""Command-line front end.

Exit status: 0 success (holds, certified, representable), 1 the property
fails, 2 usage error, 3 a resource cap was hit.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys

from . import __version__, cache
from .errors import DissocError, ResourceLimitError
from .groupoid import TableError, resolve_table

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3


class UsageError(DissocError):
    pass


def _schema(name: str) -> str:
    return f"dissoc.{name}/1"


def _int_set(text: str) -> list[int]:
    try:
        return sorted({int(x) for x in text.split(",") if x.strip()})
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _code_range(text: str) -> list[int]:
    out = set()
    for part in text.split(","):
        if "-" in part:
            a, b = part.split("-")
            out.update(range(int(a), int(b) + 1))
        elif part.strip():
            out.add(int(part))
    return sorted(out)


def _table(ref: str):
    try:
        return resolve_table(ref)
    except (TableError, ValueError, OSError) as exc:
        raise UsageError(f"cannot read table {ref!r}: {exc}")


# -- commands: each returns (payload, exit status) ------------------------------

def cmd_enumerate(args):
    from .formal_products import enumerate_products, render, to_infix
    if args.k < 1:
        raise UsageError("k must be positive")
    rows = [{"rank": r, "rpn": render(w), "infix": to_infix(w)}
            for r, w in enumerate(enumerate_products(args.k))]
    return {"schema": _schema("enumerate"), "k": args.k, "count": len(rows),
            "products": rows}, EXIT_OK


def _analyze(ref: str, k_max: int, agreement: bool):
    from .dissociativity import LevelDP, count, max_agreement, sizing
    t = _table(ref)
    dp = LevelDP(t)
    levels = []
    first = None
    for k in range(3, k_max + 1):
        classes = len(dp.level(k))
        row = {"k": k, "products": count(k), "classes": classes, "sizing": str(sizing(t, k, dp))}
        if agreement:
            row["max_agreement"] = max_agreement(t, k, dp).value
        levels.append(row)
        if first is None and classes < count(k):
            first = k
    return {"schema": _schema("analyze"), "table": t.label, "n": t.n, "k_max": k_max,
            "sat": [r["classes"] for r in levels], "levels": levels, "first_failure": first,
            "verdict": (f"not {first}-dissociative" if first else
                        f"k-dissociative for all 3 <= k <= {k_max} (bounded verification)")}


def cmd_analyze(args):
    params = {"table": str(_table(args.table).code), "k_max": args.k_max,
              "agreement": not args.no_agreement}
    payload = cache.cached("analyze", params,
                           lambda: _analyze(args.table, args.k_max, not args.no_agreement),
                           not args.no_cache)
    payload["table"] = _table(args.table).label
    return payload, EXIT_OK


def cmd_certify(args):
    from .yield_certify import certify_separation
    t = _table(args.table)
    rep = certify_separation(t, args.T, args.K, args.budget)
    return rep.to_record(), EXIT_OK if rep.certified else EXIT_FAIL


def _census(n, k, k_max, codes):
    from .dissociativity import census
    rows = census(n, k, k_max, codes)
    return {"schema": _schema("census"), "n": n, "k": k, "k_max": rows[0].k_max if rows else k,
            "rows": [{"code": r.code, "semigroup": r.semigroup, "classes": r.classes,
                      "max_agreement": r.max_agreement, "first_failure": r.first_failure}
                     for r in rows]}


def cmd_census(args):
    codes = _code_range(args.codes) if args.codes else None
    if args.n > 3 and codes is None:
        raise ResourceLimitError("a full census is limited to n <= 3; pass --codes", 3)
    params = {"n": args.n, "k": args.k, "k_max": args.k_max, "codes": args.codes or "all"}
    return cache.cached("census", params, lambda: _census(args.n, args.k, args.k_max, codes),
                        not args.no_cache), EXIT_OK


def cmd_mnk(args):
    from .dissociativity import minimal_k_associativity

    def compute():
        r = minimal_k_associativity(args.n, args.k, args.sample, args.seed)
        return {"schema": _schema("mnk"), "n": r.n, "k": r.k, "value": r.value,
                "witnesses": [f"{r.n}:{j}" for j in r.witnesses],
                "tables_checked": r.tables_checked, "sampled": r.sampled,
                "bound": "upper bound" if r.sampled else "exact"}

    params = {"n": args.n, "k": args.k, "sample": args.sample, "seed": args.seed}
    return cache.cached("mnk", params, compute, not args.no_cache), EXIT_OK


def _target(text: str, n: int):
    from .evaluation import OpVector
    text = text.strip()
    try:
        if n == 2 and not set(text) <= {"0", "1"} or text.lower().startswith("0x"):
            hexpart = text[2:] if text.lower().startswith("0x") else text
            k = (len(hexpart) * 4).bit_length() - 1
            if 1 << k != len(hexpart) * 4:
                raise UsageError("hex targets need 2**k / 4 digits")
            return OpVector.from_hex(hexpart, k)
        return OpVector.from_digits(text, n)
    except ValueError as exc:
        raise UsageError(str(exc))


def cmd_represent(args):
    from .representability import search_representation
    phi = _target(args.target, args.n)
    res = search_representation(phi, args.mode)
    rec = {"schema": _schema("represent"), "n": phi.n, "k": phi.k, "mode": res.mode,
           "target": phi.digits(), "representable": res.representable,
           "explored": res.explored,
           "witness": res.witness.to_record() if res.witness else None}
    if res.mode == "propagate":
        rec["walls"] = [" ".join(str(x) for x in e[1:]) for e in res.trace if e[0] == "wall"][:50]
    return rec, EXIT_OK if res.representable else EXIT_FAIL


def cmd_identity(args):
    from .evaluation import TermError, identity_holds, parse_identity
    try:
        ident = parse_identity(args.identity)
    except TermError as exc:
        raise UsageError(f"bad identity: {exc}")
    t = _table(args.table)
    chk = identity_holds(ident, t)
    return {"schema": _schema("identity"), "identity": str(ident), "table": t.label,
            "holds": chk.holds, "variables": list(chk.variables),
            "countermodel": chk.countermodel, "lhs": chk.lhs_value, "rhs": chk.rhs_value}, \
        EXIT_OK if chk.holds else EXIT_FAIL


def cmd_nand_check(args):
    from .boolean_nand import complete_sum, reduce_to_complete_sum, run_suite
    from .reproduce import _random_formula
    suite = run_suite(args.max_arity, args.injectivity_to)
    rng = random.Random(args.seed)
    mism = 0
    for _ in range(args.random):
        f = _random_formula(rng, 6)
        mism += reduce_to_complete_sum(f) != complete_sum(f.truth_table())
    ok = suite.ok and mism == 0
    return {"schema": _schema("nand-check"), "worked_example": suite.worked_example,
            "claim1": suite.claim1, "claim2": suite.claim2, "claim3": suite.claim3,
            "injective": {str(k): v for k, v in suite.injective.items()},
            "random_formulas": args.random, "random_mismatches": mism, "seed": args.seed,
            "ok": ok}, EXIT_OK if ok else EXIT_FAIL


def cmd_paper_check(args):
    from .reproduce import run_all
    echo = print if args.format == "text" else None
    results = run_all(args.only, echo=echo)
    ok = all(r.passed for r in results)
    return {"schema": _schema("paper-check"), "passed": ok,
            "checks": [r.to_record() for r in results], "_echoed": echo is not None}, \
        EXIT_OK if ok else EXIT_FAIL


# -- rendering --------------------------------------------------------------------

def _rows(command: str, payload: dict) -> list[dict]:
    if command == "enumerate":
        return payload["products"]
    if command == "census":
        return payload["rows"]
    if command == "analyze":
        return payload["levels"]
    if command == "paper-check":
        return payload["checks"]
    return [{"key": k, "value": json.dumps(v) if isinstance(v, (dict, list)) else v}
            for k, v in payload.items() if k != "schema"]


def _text(command: str, payload: dict) -> str:
    if command == "enumerate":
        return "\n".join(f"{r['rank']}\t{r['rpn']}\t{r['infix']}" for r in payload["products"])
    if command == "census":
        lines = ["code\tsemigroup\tclasses\tmax_agreement\tfirst_failure"]
        for r in payload["rows"]:
            lines.append(f"{r['code']}\t{int(r['semigroup'])}\t{r['classes']}\t"
                         f"{r['max_agreement']}\t{r['first_failure'] or '-'}")
        return "\n".join(lines)
    if command == "analyze":
        lines = [f"table {payload['table']}  SaT(k=3..{payload['k_max']}) = {payload['sat']}"]
        for r in payload["levels"]:
            extra = f"  max agreement {r['max_agreement']}" if "max_agreement" in r else ""
            lines.append(f"k={r['k']}: {r['classes']}/{r['products']} classes  "
                         f"sizing {r['sizing']}{extra}")
        lines.append(payload["verdict"])
        return "\n".join(lines)
    if command == "certify":
        lines = [f"{payload['table']}  T={payload['T']}  {payload['verdict']}"
                 + ("  uniformly-certified" if payload["uniformly_certified"] else "")]
        for side in ("left", "right"):
            for pair, src in payload[side].items():
                lines.append(f"  {side} {pair}: {src['source']} yields {src['values']}")
        for s in payload["split"]:
            lines.append(f"  split {s['pattern']} {s['assignment']}: {s['triples']} triples")
        for s in payload["symbolic"]:
            lines.append(f"  symbolic {s['pattern']} {s['assignment']}: A={s['A']} B={s['B']} "
                         f"{'holds' if s['holds'] else 'fails'}")
        return "\n".join(lines)
    if command == "mnk":
        return (f"M({payload['n']},{payload['k']}) = {payload['value']} ({payload['bound']}, "
                f"{payload['tables_checked']} tables); witnesses "
                + " ".join(payload["witnesses"][:20]))
    if command == "represent":
        if payload["representable"]:
            w = payload["witness"]
            return f"representable: {w['product']} via {' '.join(w['ops'])}"
        return f"not representable ({payload['explored']} {payload['mode']} steps)"
    if command == "identity":
        if payload["holds"]:
            return f"{payload['identity']} holds in {payload['table']}"
        env = ",".join(f"{k}={v}" for k, v in payload["countermodel"].items())
        return (f"{payload['identity']} fails in {payload['table']} at {env}: "
                f"lhs {payload['lhs']}, rhs {payload['rhs']}")
    if command == "nand-check":
        return "\n".join(f"{k}: {v}" for k, v in payload.items() if k != "schema")
    if command == "paper-check":
        n = sum(c["passed"] for c in payload["checks"])
        return f"{n}/{len(payload['checks'])} checks passed"
    return json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False)


def render(command: str, payload: dict, fmt: str) -> str:
    payload = {k: v for k, v in payload.items() if not k.startswith("_")}
    if fmt == "json":
        return json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False)
    if fmt == "csv":
        rows = _rows(command, payload)
        buf = io.StringIO()
        if rows:
            w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
            w.writeheader()
            w.writerows(rows)
        return buf.getvalue().rstrip("\n")
    return _text(command, payload)


# -- parser -----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json", "csv"), default="text")
    common.add_argument("--no-cache", action="store_true", help="recompute and skip the cache")

    p = argparse.ArgumentParser(prog="dissoc", description="Dissociativity of finite groupoids")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("enumerate", parents=[common], help="list the formal k-products")
    s.add_argument("k", type=int)

    s = sub.add_parser("analyze", parents=[common], help="agreement classes by arity")
    s.add_argument("table", help="n:j code, named table, or JSON table file")
    s.add_argument("--k-max", type=int, default=6)
    s.add_argument("--no-agreement", action="store_true", help="skip max agreement per k")

    s = sub.add_parser("certify", parents=[common], help="search for separation certificates")
    s.add_argument("table")
    s.add_argument("--T", type=_int_set, default=None, help="target set, e.g. 0,1")
    s.add_argument("--K", type=int, default=10)
    s.add_argument("--budget", type=int, default=20000)

    s = sub.add_parser("census", parents=[common], help="per-table metrics over all tables")
    s.add_argument("n", type=int)
    s.add_argument("k", type=int)
    s.add_argument("--k-max", type=int, default=None)
    s.add_argument("--codes", default=None, help="code list or ranges, e.g. 0-99,120")

    s = sub.add_parser("mnk", parents=[common], help="least max agreement M(n,k)")
    s.add_argument("n", type=int)
    s.add_argument("k", type=int)
    s.add_argument("--sample", type=int, default=None)
    s.add_argument("--seed", type=int, default=0)

    s = sub.add_parser("represent", parents=[common], help="is an operation some u^beta")
    s.add_argument("target", help="hex truth table (n=2) or row-major digits")
    s.add_argument("--n", type=int, default=2)
    s.add_argument("--mode", choices=("exhaustive", "propagate"), default="exhaustive")

    s = sub.add_parser("identity", parents=[common], help="check an identity in a table")
    s.add_argument("identity", help='e.g. "x*(y*z) = (x*y)*z"')
    s.add_argument("table")

    s = sub.add_parser("nand-check", parents=[common], help="prime implicant and NAND checks")
    s.add_argument("--max-arity", type=int, default=7)
    s.add_argument("--injectivity-to", type=int, default=8)
    s.add_argument("--random", type=int, default=500)
    s.add_argument("--seed", type=int, default=0)

    s = sub.add_parser("paper-check", aliases=["check"], parents=[common], help="run the acceptance checks")
    s.add_argument("--only", type=_int_set, default=None, help="check numbers, e.g. 1,5,7")
    return p


COMMANDS = {
    "enumerate": cmd_enumerate, "analyze": cmd_analyze, "certify": cmd_certify,
    "census": cmd_census, "mnk": cmd_mnk, "represent": cmd_represent,
    "identity": cmd_identity, "nand-check": cmd_nand_check, "paper-check": cmd_paper_check,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not hasattr(args, "no_cache"):
        args.no_cache = False
    try:
        if args.command == "check":
            args.command = "paper-check"
        payload, status = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceLimitError as exc:
        hint = f" (largest feasible: {exc.largest_feasible})" if exc.largest_feasible else ""
        print(f"resource limit: {exc}{hint}", file=sys.stderr)
        return EXIT_CAP
    except (KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(render(args.command, payload, args.format))
    return status


if __name__ == "__main__":
    sys.exit(main())
