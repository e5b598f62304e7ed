"""Brute-force isometric-embedding search into Z^N with verified certificates.

The engine assigns one chain vector at a time in string order, propagating the
required pairings, and breaks the signed-permutation symmetry of Z^N by
(a) consuming fresh coordinates in order with positive non-increasing
coefficients and (b) forcing non-increasing coefficients on any block of
coordinates whose columns over the partial assignment coincide.  The pruned
tree still contains a representative of every solution orbit, so an exhausted
search is a proof of absence.  Exceeding a budget turns into a distinct
"inconclusive" outcome, never into "absent".
"""

from __future__ import annotations

import json
import os
import threading
import time
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

from .arith import CF, cf_expand, continuant, is_perfect_square
from .lattice import GramLattice, Vector, chain_basis_for, det, dot, integer_kernel

ENGINE_VERSION = "1"
CACHE_SCHEMA = "ribbonlens-cache/1"


class BudgetExceededError(Exception):
    pass


@dataclass(frozen=True)
class SearchBudget:
    """Node and wall-clock caps per search problem."""

    max_nodes: int = 10**8
    max_seconds: float = 60.0

    @classmethod
    def from_env(cls) -> SearchBudget:
        nodes = os.environ.get("RIBBONLENS_MAX_NODES")
        seconds = os.environ.get("RIBBONLENS_MAX_SECONDS")
        return cls(
            max_nodes=int(nodes) if nodes else cls.max_nodes,
            max_seconds=float(seconds) if seconds else cls.max_seconds,
        )


def _resolve_budget(budget: SearchBudget | None) -> SearchBudget:
    return budget if budget is not None else SearchBudget.from_env()


@dataclass(frozen=True)
class SearchProblem:
    """Chain lattices to embed into Z^ambient_rank.

    ``ribbon_split`` is None for a plain full-rank embedding; the value 1
    marks the constrained mode where the first summand must coincide with the
    orthogonal complement of the second.
    """

    summands: tuple[CF, ...]
    ambient_rank: int
    ribbon_split: int | None = None

    def __post_init__(self) -> None:
        for terms in self.summands:
            if any(a < 2 for a in terms):
                raise ValueError("all chain terms must be >= 2")
        total = sum(len(t) for t in self.summands)
        if total != self.ambient_rank:
            raise ValueError("ambient rank must equal the total rank")
        if self.ribbon_split is not None and (len(self.summands) != 2 or self.ribbon_split != 1):
            raise ValueError("constrained mode takes exactly two summands split at 1")

    @property
    def key(self) -> str:
        mode = "plain" if self.ribbon_split is None else "ribbon"
        return mode + "|" + ";".join(",".join(str(a) for a in t) for t in self.summands)

    @classmethod
    def from_key(cls, key: str) -> SearchProblem:
        mode, _, rest = key.partition("|")
        summands = tuple(
            tuple(int(a) for a in part.split(",")) if part else ()
            for part in rest.split(";")
        ) if rest else ((),)
        total = sum(len(t) for t in summands)
        if mode == "plain":
            return cls(summands, total, None)
        if mode == "ribbon":
            return cls(summands, total, 1)
        raise ValueError(f"unknown problem key {key!r}")


def plain_problem(summands) -> SearchProblem:
    summands = tuple(tuple(t) for t in summands)
    return SearchProblem(summands, sum(len(t) for t in summands), None)


def ribbon_problem(lambda1: CF, lambda2: CF) -> SearchProblem:
    lambda1, lambda2 = tuple(lambda1), tuple(lambda2)
    return SearchProblem((lambda1, lambda2), len(lambda1) + len(lambda2), 1)


@dataclass(frozen=True)
class Certificate:
    """Embedding witness: one integer vector per chain element, per summand."""

    groups: tuple[tuple[Vector, ...], ...]
    nodes: int


@dataclass(frozen=True)
class SearchOutcome:
    status: str  # "found" | "absent" | "inconclusive"
    certificate: Certificate | None
    nodes: int
    seconds: float

    @property
    def found(self) -> bool:
        return self.status == "found"


def _square_partitions(total: int, max_len: int, max_coeff: int):
    """Non-increasing positive integers whose squares sum to total."""
    if total == 0:
        yield ()
        return
    if max_len == 0:
        return
    top = min(max_coeff, isqrt(total))
    for c in range(top, 0, -1):
        for rest in _square_partitions(total - c * c, max_len - 1, c):
            yield (c,) + rest


class _Engine:
    """DFS over chain-vector assignments; first hit wins, in canonical order."""

    def __init__(self, summands: tuple[CF, ...], ambient: int, budget: SearchBudget):
        self.N = ambient
        self.flat: list[tuple[int, int, int]] = []  # (block, position, norm)
        for bi, terms in enumerate(summands):
            for ti, a in enumerate(terms):
                self.flat.append((bi, ti, a))
        self.n = len(self.flat)
        self.budget = budget
        self.nodes = 0
        self.deadline = time.monotonic() + budget.max_seconds
        self.vecs: list[Vector] = []

    def _tick(self) -> None:
        self.nodes += 1
        if self.nodes > self.budget.max_nodes:
            raise BudgetExceededError
        if not (self.nodes & 2047) and time.monotonic() > self.deadline:
            raise BudgetExceededError

    def run(self, leaf_check):
        return self._assign(0, leaf_check)

    def _assign(self, i: int, leaf_check):
        if i == self.n:
            return leaf_check(tuple(self.vecs))
        for cand in self._candidates(i):
            self.vecs.append(cand)
            got = self._assign(i + 1, leaf_check)
            if got is not None:
                return got
            self.vecs.pop()
        return None

    def _candidates(self, i: int) -> list[Vector]:
        N = self.N
        bi, ti, norm = self.flat[i]
        prev = self.vecs
        dreq = [1 if (bj == bi and tj == ti - 1) else 0 for bj, tj, _ in self.flat[:i]]

        # column classes of the partial assignment; equal columns are
        # interchangeable, untouched coordinates also admit sign flips
        used: list[int] = []
        pattern: dict[int, tuple[int, ...]] = {}
        for c in range(N):
            col = tuple(v[c] for v in prev)
            if any(col):
                used.append(c)
                pattern[c] = col
        order: list[tuple[int, ...]] = []
        groups: dict[tuple[int, ...], list[int]] = {}
        for c in used:
            p = pattern[c]
            if p not in groups:
                groups[p] = []
                order.append(p)
            groups[p].append(c)
        coord_seq: list[int] = []
        group_start: list[bool] = []
        for p in order:
            for idx, c in enumerate(groups[p]):
                coord_seq.append(c)
                group_start.append(idx == 0)
        u = len(coord_seq)
        unused = [c for c in range(N) if c not in pattern]
        tails = []
        for j in range(i):
            t = [0] * (u + 1)
            row = prev[j]
            for k in range(u - 1, -1, -1):
                xk = row[coord_seq[k]]
                t[k] = t[k + 1] + xk * xk
            tails.append(t)

        x = [0] * u
        out: list[Vector] = []
        max_coeff = isqrt(norm)

        def rec(k: int, left: int, partials: tuple[int, ...]) -> None:
            self._tick()
            for j in range(i):
                need = dreq[j] - partials[j]
                if need * need > left * tails[j][k]:
                    return
            if k == u:
                cap = min(len(unused), left)
                for part in _square_partitions(left, cap, max_coeff):
                    vec = [0] * N
                    for kk, c in enumerate(coord_seq):
                        vec[c] = x[kk]
                    for idx, coeff in enumerate(part):
                        vec[unused[idx]] = coeff
                    out.append(tuple(vec))
                return
            c = coord_seq[k]
            cmax = isqrt(left)
            top = cmax if group_start[k] else min(cmax, x[k - 1])
            col = [prev[j][c] for j in range(i)]
            for val in range(top, -cmax - 1, -1):
                nb = left - val * val
                if nb < 0:
                    continue
                x[k] = val
                rec(k + 1, nb, tuple(p + val * cj for p, cj in zip(partials, col)))
            x[k] = 0

        rec(0, norm, (0,) * i)
        return out


def _plain_leaf(problem: SearchProblem):
    sizes = [len(t) for t in problem.summands]

    def leaf(vecs: tuple[Vector, ...]):
        groups = []
        at = 0
        for size in sizes:
            groups.append(tuple(vecs[at : at + size]))
            at += size
        return tuple(groups)

    return leaf


def _ribbon_leaf(problem: SearchProblem, tick):
    lambda1 = problem.summands[0]
    target_det = continuant(lambda1)
    N = problem.ambient_rank

    def leaf(vecs: tuple[Vector, ...]):
        kernel = integer_kernel(vecs, N)
        gram = tuple(tuple(dot(a, b) for b in kernel) for a in kernel)
        if det(gram) != target_det:
            return None
        chain = chain_basis_for(GramLattice(gram), lambda1, tick=tick)
        if chain is None:
            return None
        lifted = tuple(
            tuple(sum(coeff * kernel[r][c] for r, coeff in enumerate(ch)) for c in range(N))
            for ch in chain
        )
        return (lifted, vecs)

    return leaf


def _run_problem(problem: SearchProblem, budget: SearchBudget) -> SearchOutcome:
    start = time.monotonic()
    if problem.ribbon_split is None:
        # a full-rank sublattice of Z^N has square determinant (index formula)
        total_det = 1
        for terms in problem.summands:
            total_det *= continuant(terms)
        if not is_perfect_square(total_det):
            return SearchOutcome("absent", None, 0, time.monotonic() - start)
        engine = _Engine(problem.summands, problem.ambient_rank, budget)
        leaf = _plain_leaf(problem)
    else:
        lambda1, lambda2 = problem.summands
        p1, p2 = continuant(lambda1), continuant(lambda2)
        # det(complement) = det(saturation), so p2 = index^2 * p1 is forced
        if p2 % p1 or not is_perfect_square(p2 // p1):
            return SearchOutcome("absent", None, 0, time.monotonic() - start)
        engine = _Engine((lambda2,), problem.ambient_rank, budget)
        leaf = _ribbon_leaf(problem, engine._tick)

    try:
        groups = engine.run(leaf)
    except BudgetExceededError:
        return SearchOutcome("inconclusive", None, engine.nodes, time.monotonic() - start)
    seconds = time.monotonic() - start
    if groups is None:
        return SearchOutcome("absent", None, engine.nodes, seconds)
    cert = Certificate(tuple(groups), engine.nodes)
    if not verify_certificate(problem, cert):
        raise RuntimeError(f"internal error: unverifiable certificate for {problem.key}")
    return SearchOutcome("found", cert, engine.nodes, seconds)


def verify_certificate(problem: SearchProblem, cert: Certificate) -> bool:
    """Independent checker: recomputes every pairing and, in constrained mode,
    the complement condition.  Run on every search hit and cache load."""
    groups = cert.groups
    if len(groups) != len(problem.summands):
        return False
    N = problem.ambient_rank
    flat: list[Vector] = []
    flat_terms: list[tuple[int, int, int]] = []
    for bi, (terms, group) in enumerate(zip(problem.summands, groups)):
        if len(group) != len(terms):
            return False
        for ti, (a, v) in enumerate(zip(terms, group)):
            if len(v) != N:
                return False
            flat.append(tuple(v))
            flat_terms.append((bi, ti, a))
    for idx, (bi, ti, a) in enumerate(flat_terms):
        if dot(flat[idx], flat[idx]) != a:
            return False
        for jdx in range(idx):
            bj, tj, _ = flat_terms[jdx]
            want = 1 if (bj == bi and tj == ti - 1) else 0
            if dot(flat[idx], flat[jdx]) != want:
                return False
    # the realized Gram matrix is positive definite, so the vectors are
    # automatically linearly independent; in plain mode they fill Z^N by count
    if problem.ribbon_split is None:
        return len(flat) == N
    group1, group2 = groups
    kernel = integer_kernel(group2, N) if group2 else integer_kernel((), N)
    gram_kernel = tuple(tuple(dot(a, b) for b in kernel) for a in kernel)
    gram_one = tuple(tuple(dot(a, b) for b in group1) for a in group1)
    # group1 sits inside the complement (cross pairings vanish) with equal
    # rank; equal determinants force equality of the two lattices
    return len(group1) == len(kernel) and det(gram_one) == det(gram_kernel)


class EmbeddingCache:
    """In-memory certificate cache with an optional JSON file behind it.

    Only proven outcomes are stored; certificates re-verify on load and
    entries from a different engine version are dropped.
    """

    def __init__(self) -> None:
        self._entries: dict[str, SearchOutcome] = {}
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._entries)

    def get(self, problem: SearchProblem) -> SearchOutcome | None:
        with self._lock:
            return self._entries.get(problem.key)

    def put(self, problem: SearchProblem, outcome: SearchOutcome) -> None:
        if outcome.status == "inconclusive":
            return
        with self._lock:
            self._entries[problem.key] = outcome

    def save(self, path) -> None:
        entries = []
        with self._lock:
            items = sorted(self._entries.items())
        for key, outcome in items:
            vectors = None
            if outcome.certificate is not None:
                vectors = [
                    [[str(x) for x in v] for v in group]
                    for group in outcome.certificate.groups
                ]
            entries.append(
                {
                    "key": key,
                    "outcome": outcome.status,
                    "nodes": str(outcome.nodes),
                    "vectors": vectors,
                }
            )
        doc = {"schema": CACHE_SCHEMA, "engine": ENGINE_VERSION, "entries": entries}
        with open(path, "w", encoding="utf-8") as handle:
            json.dump(doc, handle, indent=1, sort_keys=True)
            handle.write("\n")

    def load(self, path) -> int:
        """Merge entries from a cache file; returns how many were accepted."""
        with open(path, "r", encoding="utf-8") as handle:
            doc = json.load(handle)
        if doc.get("schema") != CACHE_SCHEMA or doc.get("engine") != ENGINE_VERSION:
            return 0
        accepted = 0
        for entry in doc.get("entries", []):
            try:
                problem = SearchProblem.from_key(entry["key"])
            except (ValueError, KeyError):
                continue
            status = entry.get("outcome")
            nodes = int(entry.get("nodes", "0"))
            if status == "found":
                raw = entry.get("vectors")
                if raw is None:
                    continue
                cert = Certificate(
                    tuple(tuple(tuple(int(x) for x in v) for v in group) for group in raw),
                    nodes,
                )
                if not verify_certificate(problem, cert):
                    continue
                outcome = SearchOutcome("found", cert, nodes, 0.0)
            elif status == "absent":
                outcome = SearchOutcome("absent", None, nodes, 0.0)
            else:
                continue
            with self._lock:
                self._entries[problem.key] = outcome
            accepted += 1
        return accepted


_shared_cache = EmbeddingCache()


def shared_cache() -> EmbeddingCache:
    return _shared_cache


def find_embedding(
    problem: SearchProblem,
    budget: SearchBudget | None = None,
    cache: EmbeddingCache | None = None,
) -> SearchOutcome:
    """Full-rank isometric embedding of the summand chains into Z^N.

    Exhaustive up to signed coordinate permutation: "absent" is a proof.
    """
    if problem.ribbon_split is not None:
        raise ValueError("use find_ribbon_embedding for the constrained mode")
    return _search_cached(problem, budget, cache)


def find_ribbon_embedding(
    lambda1: CF,
    lambda2: CF,
    budget: SearchBudget | None = None,
    cache: EmbeddingCache | None = None,
) -> SearchOutcome:
    """Embedding of the second chain into Z^N (N = total rank) whose orthogonal
    complement realizes the first chain exactly."""
    return _search_cached(ribbon_problem(lambda1, lambda2), budget, cache)


def _search_cached(
    problem: SearchProblem,
    budget: SearchBudget | None,
    cache: EmbeddingCache | None,
) -> SearchOutcome:
    cache = cache if cache is not None else _shared_cache
    hit = cache.get(problem)
    if hit is not None:
        return hit
    outcome = _run_problem(problem, _resolve_budget(budget))
    cache.put(problem, outcome)
    return outcome


@dataclass(frozen=True)
class RMembershipResult:
    """Tri-state oracle answer with the underlying search outcomes."""

    fraction: Fraction
    outcome: str  # "member" | "non-member" | "inconclusive"
    reason: str
    searches: tuple[tuple[str, SearchOutcome], ...] = ()

    @property
    def certificates(self) -> dict[str, Certificate | None]:
        return {key: out.certificate for key, out in self.searches}


def r_membership(
    f: Fraction | int,
    budget: SearchBudget | None = None,
    cache: EmbeddingCache | None = None,
) -> RMembershipResult:
    """Does the lens space of this fraction bound a rational homology ball?

    Operational criterion: the order must be a perfect square, and the chains
    of both p/q and p/(p-q) must admit full-rank embeddings.  Exhaustion makes
    "non-member" a proof; budget exhaustion surfaces as "inconclusive".
    """
    f = Fraction(f)
    if f == 1:
        return RMembershipResult(f, "member", "trivial: the 3-sphere bounds a ball")
    p, q = f.numerator, f.denominator
    if not p > q > 0:
        raise ValueError(f"need p > q > 0 or the trivial fraction, got {f}")
    if not is_perfect_square(p):
        return RMembershipResult(f, "non-member", f"order {p} is not a perfect square")
    searches = []
    statuses = []
    for g in (Fraction(p, q), Fraction(p, p - q)):
        problem = plain_problem((cf_expand(g),))
        outcome = _search_cached(problem, budget, cache)
        searches.append((str(g), outcome))
        statuses.append(outcome.status)
    if "absent" in statuses:
        side = searches[statuses.index("absent")][0]
        result = "non-member"
        reason = f"no full-rank embedding for {side}"
    elif "inconclusive" in statuses:
        result = "inconclusive"
        reason = "search budget exhausted"
    else:
        result = "member"
        reason = "both orientations embed"
    return RMembershipResult(f, result, reason, tuple(searches))
