"""Command-line front end.

Exit codes: 0 on success, 1 on usage or parse errors and failed
verifications, 2 when a K-group computation did not stabilize.
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from .boundary import BoundaryPoint, act, is_fixed
from .clopen import LevelFunction, evaluate, parse_function
from .coe import orbit_representatives
from .ktheory import (
    SmithCache,
    eta_apply,
    eta_matrix,
    membership_in_image,
    explicit_preimage,
    pv_k_groups,
    q_combination,
    sigma_residue,
    split_tuple,
    verify_recurrence,
)
from .quotient import RelationSpec, class_of, density_witness, separating_element
from .words import ReducedWord, word_text

EXIT_OK, EXIT_ERROR, EXIT_UNSTABLE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--d", type=int, default=2, help="rank of the free group (default 2)")
    p.add_argument("--relation", default=None,
                   help='relation words, comma separated; "S" for all generators, "none" for none')
    p.add_argument("--level", type=int, default=None, help="cylinder level")
    p.add_argument("--max-level", type=int, default=4, help="deepest level for K-group runs (default 4)")
    p.add_argument("--format", choices=("json", "tsv"), default="json")
    p.add_argument("--cache", default=None, metavar="DIR", help="directory for cached Smith forms")
    p.add_argument("--check-bound", type=int, default=4, help="word length bound for orbit checks")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="freeboundary", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("kgroup", parents=[common], help="K-groups of the glued crossed product")

    v = sub.add_parser("verify", parents=[common], help="check the explicit identities")
    v.add_argument("check", choices=("recurrences", "obstruction", "preimage", "sigma", "all"))
    v.add_argument("--coeffs", default=None, help="n(s) per generator, comma separated, zero padded")

    w = sub.add_parser("witness", parents=[common], help="density or separation witnesses")
    w.add_argument("mode", choices=("density", "separate"))
    w.add_argument("x")
    w.add_argument("y")

    sub.add_parser("orbits", parents=[common], help="count orbits in Y for F given by --relation")

    a = sub.add_parser("act", parents=[common], help="translate a point and inspect it")
    a.add_argument("g")
    a.add_argument("x")
    a.add_argument("--class", dest="klass", default=None, metavar="RELATION",
                   help="report the class of the result under this relation")
    a.add_argument("--eval", dest="evals", action="append", default=[], metavar="FUNC",
                   help="evaluate p[w], q[w] or a constant at the result (repeatable)")
    return parser


def _config(args) -> None:
    if args.d < 2:
        raise UsageError("--d must be at least 2")
    if args.level is not None and args.level < 1:
        raise UsageError("--level must be at least 1")
    if args.max_level < 2:
        raise UsageError("--max-level must be at least 2")
    if args.check_bound < 0:
        raise UsageError("--check-bound must be nonnegative")


def _relation(args, default: str = "S") -> RelationSpec:
    return RelationSpec.parse(args.relation if args.relation is not None else default, args.d)


def _coeffs(args) -> list[int]:
    if args.coeffs is None:
        raise UsageError("--coeffs is required for this check")
    try:
        vals = [int(t) for t in args.coeffs.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"cannot parse --coeffs {args.coeffs!r}") from None
    if len(vals) > args.d:
        raise UsageError(f"--coeffs has {len(vals)} entries but d = {args.d}")
    return vals + [0] * (args.d - len(vals))


def _function_dict(f) -> dict:
    return {word_text(w): c for w, c in f.items() if c}


def cmd_kgroup(args) -> tuple[dict, int]:
    spec = _relation(args)
    cache = SmithCache(args.cache) if args.cache else None
    result = pv_k_groups(args.d, spec, args.max_level, cache=cache)
    code = EXIT_OK if result.stabilized else EXIT_UNSTABLE
    return result.report(), code


def _check_recurrences(d: int) -> list[dict]:
    items = []
    for s in range(1, d + 1):
        for k in range(2, 7):
            items.append({"check": "recurrence", "s": word_text((s,)), "k": k,
                          "pass": verify_recurrence(d, s, k)})
    return items


def _check_obstruction(d: int, coeffs: list[int], levels) -> list[dict]:
    r = q_combination(coeffs)
    items = []
    for n in levels:
        member, _ = membership_in_image(r, eta_matrix(d, n))
        expected = d == 2 or sum(coeffs) % (d - 1) == 0
        items.append({"check": "obstruction", "coeffs": coeffs, "level": n,
                      "in_image": member, "sum_residue": sum(coeffs) % (d - 1),
                      "pass": (not member) and not expected})
    return items


def _check_preimage(d: int, coeffs: list[int], levels) -> list[dict]:
    r = q_combination(coeffs)
    try:
        g = explicit_preimage(coeffs)
    except ValueError as exc:
        return [{"check": "preimage", "coeffs": coeffs, "pass": False, "reason": str(exc)}]
    direct = eta_apply(g) == r
    item = {"check": "preimage", "coeffs": coeffs,
            "preimage": {f"g[{word_text((s,))}]": _function_dict(f) for s, f in enumerate(g, start=1)},
            "eta_matches": direct}
    memberships = {}
    for n in levels:
        member, x = membership_in_image(r, eta_matrix(d, n))
        ok = member and eta_apply(split_tuple(x, d, n)) == r
        memberships[str(n)] = ok
    item["lattice_member"] = memberships
    item["pass"] = direct and all(memberships.values())
    return [item]


def _check_sigma(d: int, levels) -> list[dict]:
    items = []
    for n in levels:
        A = eta_matrix(d, n)
        ok = all(sigma_residue(LevelFunction(d, n + 1, col)) == 0 for col in A.columns())
        items.append({"check": "sigma", "level": n, "columns": A.ncols, "pass": ok})
    return items


def cmd_verify(args) -> tuple[dict, int]:
    d = args.d
    levels = [args.level] if args.level is not None else [1, 2]
    items: list[dict] = []
    if args.check in ("recurrences", "all"):
        items += _check_recurrences(d)
    if args.check == "obstruction":
        items += _check_obstruction(d, _coeffs(args), levels)
    if args.check == "preimage":
        items += _check_preimage(d, _coeffs(args), levels)
    if args.check in ("sigma", "all"):
        items += _check_sigma(d, levels)
    if args.check == "all" and args.coeffs is not None:
        coeffs = _coeffs(args)
        if d == 2 or sum(coeffs) % (d - 1) == 0:
            items += _check_preimage(d, coeffs, levels)
        else:
            items += _check_obstruction(d, coeffs, levels)
    ok = all(item["pass"] for item in items)
    return {"d": d, "check": args.check, "items": items, "pass": ok}, EXIT_OK if ok else EXIT_ERROR


def cmd_witness(args) -> tuple[dict, int]:
    d = args.d
    if args.mode == "density":
        x, y = ReducedWord.parse(args.x, d), ReducedWord.parse(args.y, d)
        h = density_witness(x, y)
        return {"mode": "density", "x": str(x), "y": str(y), "h": str(h),
                "prefixes_verified": True}, EXIT_OK
    x, y = BoundaryPoint.parse(args.x, d), BoundaryPoint.parse(args.y, d)
    g, s = separating_element(x, y)
    return {"mode": "separate", "x": str(x), "y": str(y), "g": str(g), "s": str(s),
            "separates": True}, EXIT_OK


def cmd_orbits(args) -> tuple[dict, int]:
    spec = _relation(args)
    if not spec.words:
        raise UsageError("orbits needs a nonempty relation")
    reps = orbit_representatives(spec, args.d, args.check_bound)
    return {"d": args.d, "relation": [str(w) for w in spec.words], "check_bound": args.check_bound,
            "orbit_count": len(reps), "representatives": [str(r) for r in reps]}, EXIT_OK


def cmd_act(args) -> tuple[dict, int]:
    d = args.d
    g = ReducedWord.parse(args.g, d)
    x = BoundaryPoint.parse(args.x, d)
    y = act(g, x)
    out = {"g": str(g), "x": str(x), "result": str(y),
           "is_fixed": (not g.is_identity) and is_fixed(g, x)}
    if args.klass is not None:
        spec = RelationSpec.parse(args.klass, d)
        out["relation"] = str(spec)
        out["class"] = [str(p) for p in class_of(y, spec).points]
    if args.evals:
        out["evaluations"] = {text: evaluate(parse_function(text, d), y) for text in args.evals}
    return out, EXIT_OK


COMMANDS = {"kgroup": cmd_kgroup, "verify": cmd_verify, "witness": cmd_witness,
            "orbits": cmd_orbits, "act": cmd_act}


def _tsv(report: dict) -> str:
    """Flat name/value lines; marked classes and verification items get one line each."""
    lines = []
    for key, value in report.items():
        if key == "marked":
            for name, coords in value.items():
                lines.append(f"marked\t{name}\t{','.join(map(str, coords))}")
        elif key == "items":
            for item in value:
                label = item["check"] + "".join(
                    f"\t{k}={item[k]}" for k in ("s", "k", "level") if k in item)
                lines.append(f"{label}\t{'pass' if item['pass'] else 'FAIL'}")
        elif isinstance(value, (dict, list)):
            lines.append(f"{key}\t{json.dumps(value, separators=(',', ':'))}")
        else:
            lines.append(f"{key}\t{json.dumps(value)}")
    return "\n".join(lines)


def render(report: dict, fmt: str) -> str:
    if fmt == "tsv":
        return _tsv(report)
    return json.dumps(report, indent=2)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _config(args)
        report, code = COMMANDS[args.command](args)
    except (UsageError, ValueError) as exc:
        print(f"freeboundary {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    print(render(report, args.format))
    return code


if __name__ == "__main__":
    sys.exit(main())
