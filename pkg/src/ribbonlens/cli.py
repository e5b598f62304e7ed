"""Command-line surface.

Every subcommand answers one query, prints either human text or a single
versioned JSON document (all integers rendered as decimal strings, never a
float), and exits 0 for yes/success, 1 for no, 2 for inconclusive, 64 for a
usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from math import gcd

from . import search, selfcheck
from .arith import LensSpace, cf_evaluate, cf_expand, fn_membership, lens_homeomorphic, lens_normalize
from .classify import (
    ConnectedSum,
    PairType,
    TwoBridgeLink,
    Verdict,
    chi_leq_bridge,
    ribbon_leq_lens,
    ribbon_leq_sum,
)
from .arith import FnWitness

SCHEMA = "ribbonlens/1"

EXIT_YES = 0
EXIT_NO = 1
EXIT_INCONCLUSIVE = 2
EXIT_USAGE = 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would sys.exit(2); we want 64
        raise UsageError(message)


# -- token parsing -------------------------------------------------------------


def parse_fraction(token: str) -> Fraction:
    raw = token.strip()
    num, slash, den = raw.partition("/")
    try:
        p = int(num)
        q = int(den) if slash else 1
    except ValueError:
        raise UsageError(f"malformed fraction: {token!r}") from None
    if q <= 0:
        raise UsageError(f"malformed fraction (need q >= 1): {token!r}")
    if gcd(p, q) != 1:
        raise UsageError(f"parameters not coprime in {token!r}")
    return Fraction(p, q)


def parse_lens(token: str) -> LensSpace:
    """p/q with an optional leading '-' meaning orientation reversal."""
    raw = token.strip()
    if raw in ("S3", "s3"):
        return LensSpace(1, 0)
    reverse = raw.startswith("-")
    if reverse:
        raw = raw[1:]
    f = parse_fraction(raw)
    if f < 1:
        raise UsageError(f"lens fraction must satisfy p >= q >= 0: {token!r}")
    try:
        lens = lens_normalize(f.numerator, f.denominator % f.numerator if f.numerator > 1 else 0)
    except ValueError as exc:
        raise UsageError(f"bad lens parameters {token!r}: {exc}") from None
    return lens.reverse() if reverse else lens


def parse_sum(token: str) -> ConnectedSum:
    raw = token.strip()
    if raw in ("", "S3", "s3"):
        return ConnectedSum.of()
    return ConnectedSum.of(*(parse_lens(part) for part in raw.split(",")))


def parse_links(token: str) -> tuple[TwoBridgeLink, ...]:
    raw = token.strip()
    if raw in ("", "U", "u"):
        return (TwoBridgeLink(1, 0),)
    links = []
    for part in raw.split(","):
        part = part.strip()
        if part in ("U", "u"):
            links.append(TwoBridgeLink(1, 0))
            continue
        lens = parse_lens(part)
        links.append(TwoBridgeLink(lens.p, lens.q))
    return tuple(links)


def parse_terms(token: str) -> tuple[int, ...]:
    raw = token.strip()
    if not raw:
        return ()
    try:
        terms = tuple(int(part) for part in raw.split(","))
    except ValueError:
        raise UsageError(f"malformed chain string: {token!r}") from None
    if any(a < 2 for a in terms):
        raise UsageError(f"chain terms must be >= 2: {token!r}")
    return terms


# -- JSON rendering (integers as decimal strings) -------------------------------


def lens_to_json(lens: LensSpace) -> dict:
    return {"p": str(lens.p), "q": str(lens.q)}


def lens_from_json(doc: dict) -> LensSpace:
    return LensSpace(int(doc["p"]), int(doc["q"]))


def pair_type_to_json(pair: PairType) -> dict:
    return {
        "tag": pair.tag,
        "reversed": pair.reversed,
        "left": [lens_to_json(x) for x in pair.left],
        "right": [lens_to_json(x) for x in pair.right],
        "n": None if pair.n is None else str(pair.n),
        "witness": None
        if pair.witness is None
        else {"n": str(pair.witness.n), "m": str(pair.witness.m), "k": str(pair.witness.k)},
    }


def pair_type_from_json(doc: dict) -> PairType:
    witness = doc.get("witness")
    return PairType(
        tag=doc["tag"],
        left=tuple(lens_from_json(x) for x in doc["left"]),
        right=tuple(lens_from_json(x) for x in doc["right"]),
        reversed=doc["reversed"],
        n=None if doc.get("n") is None else int(doc["n"]),
        witness=None
        if witness is None
        else FnWitness(int(witness["n"]), int(witness["m"]), int(witness["k"])),
    )


def verdict_to_json(verdict: Verdict) -> dict:
    return {
        "answer": verdict.answer,
        "witness": [pair_type_to_json(p) for p in verdict.witness],
        "obstruction": verdict.obstruction,
        "oracle": [{"fraction": f, "outcome": o} for f, o in verdict.oracle_trace],
    }


def verdict_from_json(doc: dict) -> Verdict:
    return Verdict(
        answer=doc["answer"],
        witness=tuple(pair_type_from_json(p) for p in doc["witness"]),
        obstruction=doc.get("obstruction"),
        oracle_trace=tuple((c["fraction"], c["outcome"]) for c in doc.get("oracle", ())),
    )


def certificate_to_json(cert: search.Certificate | None) -> dict | None:
    if cert is None:
        return None
    return {
        "groups": [[[str(x) for x in v] for v in group] for group in cert.groups],
        "nodes": str(cert.nodes),
    }


def certificate_from_json(doc: dict) -> search.Certificate:
    return search.Certificate(
        groups=tuple(
            tuple(tuple(int(x) for x in v) for v in group) for group in doc["groups"]
        ),
        nodes=int(doc["nodes"]),
    )


def outcome_to_json(outcome: search.SearchOutcome) -> dict:
    return {
        "status": outcome.status,
        "nodes": str(outcome.nodes),
        "certificate": certificate_to_json(outcome.certificate),
    }


# -- verdict presentation --------------------------------------------------------


def _pair_text(pair: PairType) -> str:
    bits = [pair.tag]
    if pair.n is not None:
        bits.append(f"n={pair.n}")
    if pair.witness is not None:
        bits.append(f"(m={pair.witness.m},k={pair.witness.k})")
    if pair.reversed:
        bits.append("[reversed]")
    lhs = "#".join(str(x) for x in pair.left) or "S3"
    rhs = "#".join(str(x) for x in pair.right)
    bits.append(f"{lhs} -> {rhs}")
    return " ".join(bits)


def _verdict_lines(verdict: Verdict) -> list[str]:
    lines = [verdict.answer]
    for pair in verdict.witness:
        lines.append("  " + _pair_text(pair))
    if verdict.obstruction:
        lines.append(f"  obstruction: {verdict.obstruction}")
    for fraction, outcome in verdict.oracle_trace:
        lines.append(f"  oracle {fraction}: {outcome}")
    return lines


def _verdict_exit(verdict: Verdict) -> int:
    return {"yes": EXIT_YES, "no": EXIT_NO, "inconclusive": EXIT_INCONCLUSIVE}[verdict.answer]


# -- subcommand handlers ---------------------------------------------------------


def _budget(args) -> search.SearchBudget:
    base = search.SearchBudget.from_env()
    nodes = args.max_nodes if args.max_nodes is not None else base.max_nodes
    seconds = args.max_seconds if args.max_seconds is not None else base.max_seconds
    return search.SearchBudget(max_nodes=nodes, max_seconds=seconds)


def _cache_path(args) -> str | None:
    if args.cache is not None:
        return args.cache
    return os.environ.get("RIBBONLENS_CACHE")


def _load_cache(args) -> tuple[search.EmbeddingCache, str | None]:
    cache = search.EmbeddingCache()
    path = _cache_path(args)
    if path and os.path.exists(path):
        cache.load(path)
    return cache, path


def _save_cache(cache: search.EmbeddingCache, path: str | None) -> None:
    if path:
        cache.save(path)


def cmd_cf(args) -> tuple[int, dict, list[str]]:
    f = parse_fraction(args.fraction)
    if f <= 1:
        raise UsageError(f"expansion needs p/q > 1: {args.fraction!r}")
    terms = cf_expand(f)
    value = cf_evaluate(terms)
    assert value == f
    doc = {"fraction": str(f), "terms": [str(a) for a in terms], "value": str(value)}
    text = [f"{f} = [{','.join(str(a) for a in terms)}]^-"]
    return EXIT_YES, doc, text


def cmd_lens_cmp(args) -> tuple[int, dict, list[str]]:
    a = parse_lens(args.first)
    b = parse_lens(args.second)
    same = lens_homeomorphic(a, b, oriented=args.oriented)
    doc = {
        "first": lens_to_json(a),
        "second": lens_to_json(b),
        "oriented": args.oriented,
        "homeomorphic": same,
    }
    text = [f"{a} {'~' if same else '!~'} {b} ({'oriented' if args.oriented else 'unoriented'})"]
    return (EXIT_YES if same else EXIT_NO), doc, text


def cmd_fn(args) -> tuple[int, dict, list[str]]:
    f = parse_fraction(args.fraction)
    if not f.numerator > f.denominator > 0:
        raise UsageError(f"family membership needs p > q > 0: {args.fraction!r}")
    witnesses = fn_membership(f)
    doc = {
        "fraction": str(f),
        "witnesses": [{"n": str(w.n), "m": str(w.m), "k": str(w.k)} for w in witnesses],
    }
    if witnesses:
        text = [f"{f} = n*m^2/(n*m*k+1) for " + "; ".join(f"n={w.n}, m={w.m}, k={w.k}" for w in witnesses)]
    else:
        text = [f"{f} lies in no square-multiple family"]
    return (EXIT_YES if witnesses else EXIT_NO), doc, text


def cmd_in_r(args) -> tuple[int, dict, list[str]]:
    f = parse_fraction(args.fraction)
    if f != 1 and not f.numerator > f.denominator > 0:
        raise UsageError(f"need p > q > 0 or the trivial fraction: {args.fraction!r}")
    cache, path = _load_cache(args)
    result = search.r_membership(f, budget=_budget(args), cache=cache)
    _save_cache(cache, path)
    doc = {
        "fraction": str(f),
        "outcome": result.outcome,
        "reason": result.reason,
        "searches": [
            {"fraction": g, **outcome_to_json(out)} for g, out in result.searches
        ],
        "cache_path": path,
    }
    text = [f"{f}: {result.outcome} ({result.reason})"]
    code = {"member": EXIT_YES, "non-member": EXIT_NO, "inconclusive": EXIT_INCONCLUSIVE}
    return code[result.outcome], doc, text


def cmd_ribbon(args) -> tuple[int, dict, list[str]]:
    a = parse_lens(args.first)
    b = parse_lens(args.second)
    cache, path = _load_cache(args)
    verdict = ribbon_leq_lens(a, b, budget=_budget(args), cache=cache)
    _save_cache(cache, path)
    doc = {
        "first": lens_to_json(a),
        "second": lens_to_json(b),
        "verdict": verdict_to_json(verdict),
    }
    return _verdict_exit(verdict), doc, _verdict_lines(verdict)


def cmd_ribbon_sum(args) -> tuple[int, dict, list[str]]:
    y1 = parse_sum(args.first)
    y2 = parse_sum(args.second)
    cache, path = _load_cache(args)
    verdict = ribbon_leq_sum(y1, y2, budget=_budget(args), cache=cache)
    _save_cache(cache, path)
    doc = {
        "first": [lens_to_json(x) for x in y1.summands],
        "second": [lens_to_json(x) for x in y2.summands],
        "verdict": verdict_to_json(verdict),
    }
    return _verdict_exit(verdict), doc, _verdict_lines(verdict)


def cmd_bridge(args) -> tuple[int, dict, list[str]]:
    k1 = parse_links(args.first)
    k2 = parse_links(args.second)
    cache, path = _load_cache(args)
    verdict = chi_leq_bridge(k1, k2, budget=_budget(args), cache=cache)
    _save_cache(cache, path)
    doc = {
        "first": [{"p": str(k.p), "q": str(k.q)} for k in k1],
        "second": [{"p": str(k.p), "q": str(k.q)} for k in k2],
        "verdict": verdict_to_json(verdict),
    }
    return _verdict_exit(verdict), doc, _verdict_lines(verdict)


def cmd_embed(args) -> tuple[int, dict, list[str]]:
    summands = tuple(parse_terms(token) for token in args.summands)
    cache, path = _load_cache(args)
    if args.ribbon_split is not None:
        if args.ribbon_split != 1 or len(summands) != 2:
            raise UsageError("--ribbon-split takes the value 1 with exactly two --summands")
        outcome = search.find_ribbon_embedding(
            summands[0], summands[1], budget=_budget(args), cache=cache
        )
    else:
        try:
            problem = search.plain_problem(summands)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        outcome = search.find_embedding(problem, budget=_budget(args), cache=cache)
    _save_cache(cache, path)
    doc = {
        "summands": [[str(a) for a in terms] for terms in summands],
        "ribbon_split": None if args.ribbon_split is None else str(args.ribbon_split),
        **outcome_to_json(outcome),
    }
    text = [f"{outcome.status} (nodes={outcome.nodes})"]
    if outcome.certificate:
        for group in outcome.certificate.groups:
            text.append("  " + " ".join(str(list(v)) for v in group))
    code = {"found": EXIT_YES, "absent": EXIT_NO, "inconclusive": EXIT_INCONCLUSIVE}
    return code[outcome.status], doc, text


def cmd_selfcheck(args) -> tuple[int, dict, list[str]]:
    results = selfcheck.run_all(max_p=args.max_p, jobs=args.jobs)
    doc = {
        "results": [
            {"name": r.name, "passed": r.passed, "detail": r.detail} for r in results
        ],
        "all_passed": all(r.passed for r in results),
    }
    text = [
        f"{'PASS' if r.passed else 'FAIL'} {r.name} ({r.seconds:.1f}s) {r.detail}"
        for r in results
    ]
    return (EXIT_YES if doc["all_passed"] else EXIT_NO), doc, text


# -- parser --------------------------------------------------------------------


def build_parser() -> _Parser:
    parser = _Parser(prog="ribbonlens", description=__doc__)
    parser.add_argument("--format", choices=("text", "json"), default="text")
    parser.add_argument("--max-nodes", type=int, default=None, help="search node budget")
    parser.add_argument("--max-seconds", type=float, default=None, help="search time budget")
    parser.add_argument("--cache", default=None, help="certificate cache file")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cf", help="negative continued fraction expansion")
    p.add_argument("fraction")
    p.set_defaults(func=cmd_cf)

    lens = sub.add_parser("lens", help="lens space utilities")
    lens_sub = lens.add_subparsers(dest="lens_command", required=True)
    p = lens_sub.add_parser("cmp", help="homeomorphism test")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--oriented", action="store_true")
    p.set_defaults(func=cmd_lens_cmp)

    p = sub.add_parser("fn", help="square-multiple family witnesses")
    p.add_argument("fraction")
    p.set_defaults(func=cmd_fn)

    p = sub.add_parser("in-r", help="rational-ball membership oracle")
    p.add_argument("fraction")
    p.set_defaults(func=cmd_in_r)

    p = sub.add_parser("ribbon", help="ribbon cobordism between two lens spaces")
    p.add_argument("first")
    p.add_argument("second")
    p.set_defaults(func=cmd_ribbon)

    p = sub.add_parser("ribbon-sum", help="ribbon cobordism between connected sums")
    p.add_argument("first")
    p.add_argument("second")
    p.set_defaults(func=cmd_ribbon_sum)

    p = sub.add_parser("bridge", help="chi-concordance of 2-bridge link sums")
    p.add_argument("first")
    p.add_argument("second")
    p.set_defaults(func=cmd_bridge)

    p = sub.add_parser("embed", help="raw lattice embedding search")
    p.add_argument("--summands", action="append", required=True, metavar="a1,a2,...")
    p.add_argument("--ribbon-split", type=int, default=None)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("selfcheck", help="run the acceptance cross-validation suites")
    p.add_argument("--max-p", type=int, default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_selfcheck)

    return parser


def run(argv, stdout=None, stderr=None) -> int:
    stdout = stdout if stdout is not None else sys.stdout
    stderr = stderr if stderr is not None else sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        code, doc, text = args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=stderr)
        return EXIT_USAGE
    if args.format == "json":
        envelope = {"schema": SCHEMA, "command": args.command, "result": doc}
        print(json.dumps(envelope, sort_keys=True, separators=(",", ":")), file=stdout)
    else:
        for line in text:
            print(line, file=stdout)
    return code


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
