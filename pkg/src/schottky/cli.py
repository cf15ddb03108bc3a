"""Command-line front end.

Exit codes: 0 certified, 1 inconclusive or rejected, 2 input error,
3 unsupported input, 4 internal inconsistency between a certificate and
the brute-force oracle.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from importlib import resources

from . import __version__
from .a2_link import (
    Corollary2Input,
    build_plane,
    corollary2_check,
    example8_config,
    f_translation_vector,
    opposite,
)
from .bt_tree import (
    NotHyperbolic,
    TreeIsometry,
    TreeVertex,
    UnsupportedIsometry,
    classify,
    pingpong_sets,
    schottky_check,
)
from .cat0_config import check_theorem1, load_config
from .exact_arith import Matrix, ValidationError, check_prime, format_rational
from .pingpong import tree_universe, verify_hypotheses
from .word_oracle import displacement_scan, freeness_check

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT, EXIT_UNSUPPORTED, EXIT_INCONSISTENT = 0, 1, 2, 3, 4
MAX_LEN_GUARD = 14

SANOV_A = [[1, 2], [0, 1]]
SANOV_B = [[1, 0], [2, 1]]

_SUB = str.maketrans("0123456789-", "₀₁₂₃₄₅₆₇₈₉₋")


class InputError(Exception):
    pass


def _dump(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _emit(args, report: dict, lines: list[str]):
    for line in lines:
        print(line)
    if getattr(args, "json", None):
        with open(args.json, "w", encoding="utf-8") as fh:
            fh.write(_dump(report))


def _read_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def load_generators(data) -> tuple[int, list[TreeIsometry], list[str]]:
    """Parse ``{"prime": p, "generators": [{"name", "matrix"}]}``."""
    if not isinstance(data, dict) or "prime" not in data or "generators" not in data:
        raise InputError("generator file needs 'prime' and 'generators'")
    p = check_prime(data["prime"])
    gens, names = [], []
    for k, entry in enumerate(data["generators"]):
        if not isinstance(entry, dict) or "matrix" not in entry:
            raise InputError(f"generator {k} lacks a matrix")
        name = str(entry.get("name", f"g{k + 1}"))
        gens.append(TreeIsometry(Matrix.from_json(entry["matrix"]), p, name))
        names.append(name)
    return p, gens, names


def _base_report(command: str, args, echo) -> dict:
    return {
        "tool": "schottky",
        "version": __version__,
        "command": command,
        "input": echo,
        "parameters": {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "json", "file", "command")},
    }


def cmd_classify(args) -> int:
    if args.file:
        p, gens, names = load_generators(_read_json(args.file))
    else:
        if args.matrix is None or args.prime is None:
            raise InputError("classify needs --matrix and --prime, or --file")
        try:
            rows = json.loads(args.matrix)
        except json.JSONDecodeError as exc:
            raise InputError(f"cannot parse matrix: {exc}") from exc
        p = check_prime(args.prime)
        gens, names = [TreeIsometry(Matrix.from_json(rows), p)], ["g"]
    report = _base_report("classify", args, {"prime": p, "matrices": [g.matrix.to_json() for g in gens]})
    lines, out = [], []
    for name, g in zip(names, gens):
        c = classify(g)
        tv = "inf" if c.trace_valuation == float("inf") else str(c.trace_valuation)
        val = f"v{str(p).translate(_SUB)}(tr)={tv}"
        text = f"hyperbolic, ℓ = {c.length} ({val})" if c.hyperbolic else f"elliptic ({val})"
        lines.append(f"{name}: {text}" if len(gens) > 1 else text)
        out.append({"name": name, "kind": c.kind, "translation_length": c.length, "trace_valuation": tv})
    report["classification"] = out
    _emit(args, report, lines)
    return EXIT_OK


def _verify_pair(p, gens, args):
    """schottky_check plus optional sampling and oracle; returns (report, exit code)."""
    verdict = schottky_check(gens)
    body = verdict.to_json()
    code = EXIT_OK if verdict.certified else EXIT_NEGATIVE
    lines = [f"verdict: {verdict.status}" + (f": {verdict.reason}" if verdict.reason else "")]
    if verdict.certified:
        lines.append(f"free of rank {verdict.rank}; discrete (T_{p} is locally compact)")
        sets = pingpong_sets(gens, verdict.domains)
        body["pingpong_sets"] = sets.to_json()
        if args.samples:
            universe, family = tree_universe(gens, sets)
            hyp = verify_hypotheses(universe, family, args.samples, args.seed)
            body["pingpong_sampling"] = hyp.to_json()
            lines.append(f"ping-pong sampling: {hyp.summary}")
            if not hyp.ok:
                code = EXIT_INCONSISTENT
    if args.oracle:
        mats = [g.matrix for g in gens]
        free = freeness_check(mats, args.max_len)
        disp_len = min(args.max_len, 8)
        disp = displacement_scan(gens, disp_len, TreeVertex.standard(p))
        body["oracle"] = {
            "freeness": {"max_len": args.max_len, **free.to_json()},
            "displacement": {"max_len": disp_len, **disp.to_json()},
        }
        consistent = free.first_trivial_word is None and disp.zero_displacement_count == 0
        body["oracle"]["consistent_with_certificate"] = consistent if verdict.certified else None
        lines.append(
            f"oracle: {free.words_checked} words to length {args.max_len}, "
            f"first trivial word: {free.first_trivial_word or 'none'}; "
            f"min displacement to length {disp_len}: "
            f"{disp.min_displacement[1] if disp.min_displacement else 'n/a'}"
        )
        if verdict.certified and not consistent:
            lines.append("INTERNAL INCONSISTENCY: certificate contradicted by the word oracle")
            code = EXIT_INCONSISTENT
    return body, code, lines


def _check_len(args):
    if not 1 <= args.max_len <= MAX_LEN_GUARD:
        raise InputError(f"--max-len must be between 1 and {MAX_LEN_GUARD}")


def cmd_verify(args) -> int:
    if not args.file:
        raise InputError("verify needs --file")
    _check_len(args)
    data = _read_json(args.file)
    p, gens, names = load_generators(data)
    report = _base_report("verify", args, data)
    body, code, lines = _verify_pair(p, gens, args)
    report["result"] = body
    report["exit_code"] = code
    _emit(args, report, lines)
    return code


def cmd_oracle(args) -> int:
    if not args.file:
        raise InputError("oracle needs --file")
    _check_len(args)
    data = _read_json(args.file)
    p, gens, _ = load_generators(data)
    free = freeness_check([g.matrix for g in gens], args.max_len)
    disp = displacement_scan(gens, args.max_len)
    report = _base_report("oracle", args, data)
    report["freeness"] = free.to_json()
    report["displacement"] = disp.to_json()
    lines = [
        f"words checked: {free.words_checked} (per length {free.counts_by_length})",
        f"first trivial word: {free.first_trivial_word or 'none'}",
        f"zero-displacement words: {disp.zero_displacement_count}",
    ]
    _emit(args, report, lines)
    return EXIT_OK if free.first_trivial_word is None else EXIT_NEGATIVE


def cmd_config(args) -> int:
    if not args.file:
        raise InputError("config needs --file")
    data = _read_json(args.file)
    axes, rels = load_config(data)
    verdict = check_theorem1(axes, rels)
    report = _base_report("config", args, data)
    report["result"] = verdict.to_json()
    lines = [verdict.status + (f": {verdict.reason}" if verdict.reason else "")]
    if verdict.certified:
        lines.append(f"free of rank {len(axes)}")
    lines += [f"warning: {w}" for w in verdict.warnings]
    _emit(args, report, lines)
    return EXIT_OK if verdict.certified else EXIT_NEGATIVE


def cmd_plane(args) -> int:
    plane = build_plane(args.order)
    report = _base_report("plane", args, {"order": args.order})
    report["plane"] = plane.to_json()
    problems = plane.axiom_violations()
    report["axioms_hold"] = not problems
    _emit(args, report, [f"PG(2,{args.order}): {len(plane.points)} points, {len(plane.lines)} lines, "
                         f"{len(plane.chambers())} chambers; axioms {'hold' if not problems else 'FAIL'}"])
    return EXIT_OK


def demo_sanov(args) -> tuple[dict, int, list[str]]:
    p = 2
    a, b = Matrix(SANOV_A), Matrix(SANOV_B)
    ga, gb = TreeIsometry(a, p, "A"), TreeIsometry(b, p, "B")
    ca, cb = classify(ga), classify(gb)
    free_len, disp_len = 10, 6
    free = freeness_check([a, b], free_len)
    disp = displacement_scan([ga, gb], disp_len, TreeVertex.standard(p))
    nontrivial = disp.words_checked - free.trivial_count
    all_fixed = free.first_trivial_word is None and disp.zero_displacement_count == disp.words_checked
    lines = [
        f"A: {ca.kind} (v₂(tr)={ca.trace_valuation}); B: {cb.kind} (v₂(tr)={cb.trace_valuation})",
        (
            f"no trivial reduced word up to length {free_len} ({free.words_checked} words checked)"
            if free.first_trivial_word is None
            else f"trivial word found: {free.first_trivial_word}"
        ),
        (
            f"all words fix the standard vertex (lengths <= {disp_len}, {nontrivial} words)"
            if all_fixed
            else f"{disp.zero_displacement_count} of {disp.words_checked} words fix the standard vertex"
        ),
    ]
    ok = ca.kind == cb.kind == "elliptic" and free.first_trivial_word is None and all_fixed
    if ok:
        lines.append("free of rank two, yet infinitely many elements fix a vertex: not discrete in PSL2(Q_2)")
    report = {
        "classification": {
            "A": {"kind": ca.kind, "trace_valuation": ca.trace_valuation},
            "B": {"kind": cb.kind, "trace_valuation": cb.trace_valuation},
        },
        "freeness": {"max_len": free_len, **free.to_json()},
        "displacement": {"max_len": disp_len, **disp.to_json()},
        "conclusion": {"free_rank_two_evidence": free.first_trivial_word is None, "not_discrete_evidence": all_fixed},
    }
    return report, EXIT_OK if ok else EXIT_INCONSISTENT, lines


def demo_a2(args) -> tuple[dict, int, list[str]]:
    q, k = 3, 2
    plane = build_plane(q)
    pairs = example8_config(plane, k)
    chambers = [c for pair in pairs for c in pair]
    opp = [[opposite(plane, c, d) if i != j else True for j, d in enumerate(chambers)] for i, c in enumerate(chambers)]
    n_opp = sum(opp[i][j] for i in range(len(chambers)) for j in range(i + 1, len(chambers)))
    p = args.prime or 3
    length = Fraction(args.length) if args.length else Fraction(1)
    # k generic conjugates of f = diag(1, p, 1/p) whose axes all pass through one vertex x
    c2 = Corollary2Input(
        lengths=[length] * k,
        opposite=[[True] * k for _ in range(k)],
        distances=[[0]],
        locally_compact=True,
        labels=["x"],
    )
    verdict = corollary2_check(c2)
    lines = [
        f"PG(2,{q}): {len(plane.points)} points; chambers through lines at point {plane.points[0]}",
        f"pairwise-opposite chamber configuration, k={k}: {len(chambers)} chambers, {n_opp} of "
        f"{len(chambers) * (len(chambers) - 1) // 2} pairs opposite",
        f"f = diag(1, {p}, 1/{p}) moves the standard vertex by elementary divisors {f_translation_vector(p)}",
        f"ball criterion (shared intersection point, ℓ = {format_rational(length)}): {verdict.status}"
        + (f" -> {', '.join(verdict.conclusions)}" if verdict.conclusions else ""),
    ]
    report = {
        "plane_order": q,
        "pairs": [[[c.point, c.line] for c in pair] for pair in pairs],
        "chamber_points": [list(plane.points[c.point]) for c in chambers],
        "chamber_lines": [list(plane.lines[c.line]) for c in chambers],
        "opposite_pairs": n_opp,
        "f_elementary_divisor_valuations": f_translation_vector(p),
        "corollary_input": c2.to_json(),
        "corollary_verdict": verdict.to_json(),
    }
    ok = n_opp == len(chambers) * (len(chambers) - 1) // 2 and verdict.certified
    return report, EXIT_OK if ok else EXIT_INCONSISTENT, lines


def cmd_demo(args) -> int:
    body, code, lines = (demo_sanov if args.name == "sanov" else demo_a2)(args)
    report = _base_report("demo", args, {"name": args.name})
    report["result"] = body
    _emit(args, report, lines)
    return code


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="schottky", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"schottky {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, *, file=True):
        if file:
            sp.add_argument("--file", help="input JSON file")
        sp.add_argument("--json", metavar="OUT", help="write the JSON report here")
        return sp

    sp = common(sub.add_parser("classify", help="classify an isometry of T_p"))
    sp.add_argument("--matrix", help='inline matrix, e.g. "[[1,2],[0,1]]"')
    sp.add_argument("--prime", type=int)
    sp.set_defaults(func=cmd_classify)

    sp = common(sub.add_parser("verify", help="run the Schottky criterion on a generator file"))
    sp.add_argument("--oracle", action="store_true", help="cross-check with the word oracle")
    sp.add_argument("--max-len", type=int, default=10)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--samples", type=int, default=200, help="ping-pong samples (0 disables)")
    sp.set_defaults(func=cmd_verify)

    sp = common(sub.add_parser("oracle", help="brute-force word scan of a generator file"))
    sp.add_argument("--max-len", type=int, default=8)
    sp.set_defaults(func=cmd_oracle)

    sp = common(sub.add_parser("config", help="check an abstract CAT(0) configuration"))
    sp.set_defaults(func=cmd_config)

    sp = common(sub.add_parser("plane", help="export PG(2,q)"), file=False)
    sp.add_argument("--order", type=int, required=True)
    sp.set_defaults(func=cmd_plane)

    sp = common(sub.add_parser("demo", help="worked examples"), file=False)
    sp.add_argument("name", choices=["sanov", "a2"])
    sp.add_argument("--prime", type=int)
    sp.add_argument("--length", help="translation length used for the a2 corollary check")
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_demo)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except UnsupportedIsometry as exc:
        print(f"unsupported: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except (InputError, ValidationError, NotHyperbolic, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def demo_file(name: str) -> str:
    return str(resources.files("schottky") / "data" / name)


if __name__ == "__main__":
    sys.exit(main())
