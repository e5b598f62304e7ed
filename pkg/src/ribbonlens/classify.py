"""Decision procedures for ribbon rational homology cobordisms.

Answers whether one (connected sum of) lens space(s) admits a ribbon
rational homology cobordism to another, and the induced question for ribbon
chi-concordance of 2-bridge links through the branched double cover
dictionary.  Every yes comes with a replayable decomposition witness; every
no names the obstruction; oracle-dependent branches degrade to
"inconclusive" instead of guessing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Callable, Iterable

from . import search
from .arith import (
    FnWitness,
    LensSpace,
    fn_membership,
    h1_order,
    lens_homeomorphic,
    lens_normalize,
    square_ratio_check,
)

Oracle = Callable[[Fraction], str]

YES = "yes"
NO = "no"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class ConnectedSum:
    """Multiset of lens-space summands; the empty sum is the 3-sphere."""

    summands: tuple[LensSpace, ...]

    def __post_init__(self) -> None:
        if any(lens.is_s3 for lens in self.summands):
            raise ValueError("S^3 summands are stripped; use ConnectedSum.of")
        if tuple(sorted(self.summands)) != self.summands:
            raise ValueError("summands must be sorted; use ConnectedSum.of")

    @classmethod
    def of(cls, *summands: LensSpace) -> ConnectedSum:
        return cls(tuple(sorted(lens for lens in summands if not lens.is_s3)))

    @classmethod
    def from_fractions(cls, fractions: Iterable[Fraction]) -> ConnectedSum:
        return cls.of(*(lens_normalize(f.numerator, f.denominator) for f in fractions))

    @property
    def is_s3(self) -> bool:
        return not self.summands

    def reverse(self) -> ConnectedSum:
        return ConnectedSum.of(*(lens.reverse() for lens in self.summands))

    def __str__(self) -> str:
        return "S3" if self.is_s3 else "#".join(str(lens) for lens in self.summands)


@dataclass(frozen=True)
class PairType:
    """One decomposition summand of a ribbon cobordism, tagged T1 through T7.

    ``reversed`` records that the defining condition holds after reversing
    the orientation of both sides of this pair simultaneously.
    """

    tag: str
    left: tuple[LensSpace, ...]
    right: tuple[LensSpace, ...]
    reversed: bool = False
    n: int | None = None
    witness: FnWitness | None = None


@dataclass(frozen=True)
class Verdict:
    answer: str
    witness: tuple[PairType, ...] = ()
    obstruction: str | None = None
    oracle_trace: tuple[tuple[str, str], ...] = ()

    @property
    def yes(self) -> bool:
        return self.answer == YES


@dataclass(frozen=True)
class Condition:
    name: str
    passed: bool
    detail: str


@dataclass(frozen=True)
class ConditionReport:
    conditions: tuple[Condition, ...]

    @property
    def all_pass(self) -> bool:
        return all(c.passed for c in self.conditions)

    @property
    def first_failure(self) -> str | None:
        for c in self.conditions:
            if not c.passed:
                return c.name
        return None


def necessary_conditions(y1: ConnectedSum, y2: ConnectedSum) -> ConditionReport:
    """Cheap obstructions checked before any matching or oracle work."""
    n1, n2 = h1_order(y1), h1_order(y2)
    conditions = [
        Condition(
            "square-ratio",
            square_ratio_check(y1, y2),
            f"|H1| ratio {n2}/{n1} must be a perfect square",
        )
    ]
    if len(y1.summands) <= 1 and len(y2.summands) <= 1:
        conditions.append(
            Condition(
                "order-divisibility",
                n2 % n1 == 0,
                f"|H1| order {n1} must divide {n2}",
            )
        )
    return ConditionReport(tuple(conditions))


class _Trace:
    """Records distinct oracle calls in first-use order."""

    def __init__(self, oracle: Oracle):
        self._oracle = oracle
        self._seen: dict[str, str] = {}

    def __call__(self, f: Fraction) -> str:
        key = str(f)
        if key not in self._seen:
            self._seen[key] = self._oracle(f)
        return self._seen[key]

    @property
    def calls(self) -> tuple[tuple[str, str], ...]:
        return tuple(self._seen.items())


def _default_oracle(
    budget: search.SearchBudget | None, cache: search.EmbeddingCache | None
) -> Oracle:
    def call(f: Fraction) -> str:
        return search.r_membership(f, budget=budget, cache=cache).outcome

    return call


def _resolve_oracle(
    oracle: Oracle | None,
    budget: search.SearchBudget | None,
    cache: search.EmbeddingCache | None,
) -> Oracle:
    return oracle if oracle is not None else _default_oracle(budget, cache)


def _is_ln1(lens: LensSpace) -> int | None:
    """The n >= 2 with lens oriented-homeomorphic to L(n, 1), if any."""
    if not lens.is_s3 and lens.q == 1:
        return lens.p
    return None


def _fn_witness_for(lens: LensSpace, n: int) -> FnWitness | None:
    f = lens.fraction()
    if f is None:
        return None
    for wit in fn_membership(f):
        if wit.n == n:
            return wit
    return None


def _first_pair_options(a: LensSpace, b: LensSpace) -> list[PairType]:
    """T1/T2 pairings consuming the left summand a against the right summand b."""
    options: list[PairType] = []
    if lens_homeomorphic(a, b, oriented=True):
        options.append(PairType("T1", (a,), (b,)))
    for rev in (False, True):
        aa, bb = (a, b) if not rev else (a.reverse(), b.reverse())
        n = _is_ln1(aa)
        if n is None or bb.is_s3:
            continue
        wit = _fn_witness_for(bb, n)
        if wit is not None:
            # sanity required of every T2 witness: n/1 never lies in its own family
            assert not fn_membership(Fraction(n, 1))
            options.append(PairType("T2", (a,), (b,), reversed=rev, n=n, witness=wit))
    return options


def ribbon_leq_lens(
    l1: LensSpace,
    l2: LensSpace,
    oracle: Oracle | None = None,
    budget: search.SearchBudget | None = None,
    cache: search.EmbeddingCache | None = None,
) -> Verdict:
    """Is there a ribbon cobordism from one lens space to the other?

    Yes exactly when, up to simultaneous reversal, the spaces agree, or the
    source is L(n, 1) with the target fraction in the n-th square-multiple
    family, or the source is S^3 and the target bounds a rational ball.
    """
    trace = _Trace(_resolve_oracle(oracle, budget, cache))
    report = necessary_conditions(ConnectedSum.of(l1), ConnectedSum.of(l2))
    if not report.all_pass:
        return Verdict(NO, obstruction=report.first_failure)
    if lens_homeomorphic(l1, l2, oriented=True):
        return Verdict(YES, (PairType("T1", (l1,), (l2,)),))
    for rev in (False, True):
        a, b = (l1, l2) if not rev else (l1.reverse(), l2.reverse())
        n = _is_ln1(a)
        if n is None or b.is_s3:
            continue
        wit = _fn_witness_for(b, n)
        if wit is not None:
            assert not fn_membership(Fraction(n, 1))
            return Verdict(YES, (PairType("T2", (l1,), (l2,), reversed=rev, n=n, witness=wit),))
    pending = False
    for rev in (False, True):
        a, b = (l1, l2) if not rev else (l1.reverse(), l2.reverse())
        if not a.is_s3 or b.is_s3:
            continue
        outcome = trace(b.fraction())
        if outcome == "member":
            return Verdict(YES, (PairType("T3", (), (l2,), reversed=rev),), oracle_trace=trace.calls)
        if outcome == "inconclusive":
            pending = True
    if pending:
        return Verdict(INCONCLUSIVE, obstruction="oracle-budget", oracle_trace=trace.calls)
    return Verdict(NO, obstruction="no-matching-case", oracle_trace=trace.calls)


def two_summand_ball(m1: LensSpace, m2: LensSpace) -> Verdict:
    """Does the two-summand sum bound a ribbon rational homology ball, via one
    of the four sanctioned shapes (up to overall reversal and summand order)?

    Callers route summands that individually bound to the singleton case
    instead; this check is purely arithmetic.
    """
    if m1.is_s3 or m2.is_s3:
        raise ValueError("two-summand check needs nontrivial summands")
    pair = (m1, m2)
    # mirror pair: L(p,p-q) # L(p,q)
    if lens_homeomorphic(m2, m1.reverse(), oriented=True):
        return Verdict(YES, (PairType("T4", (), pair),))
    for rev in (False, True):
        a, b = pair if not rev else (m1.reverse(), m2.reverse())
        for x, y, swapped in ((a, b, False), (b, a, True)):
            # L(n, n-1) # (fraction in the n-th family)
            if x.q == x.p - 1 and x.p >= 2:
                wit = _fn_witness_for(y, x.p)
                if wit is not None:
                    return Verdict(
                        YES, (PairType("T5", (), pair, reversed=rev, n=x.p, witness=wit),)
                    )
    for rev in (False, True):
        a, b = pair if not rev else (m1.reverse(), m2.reverse())
        for x, y in ((a, b), (b, a)):
            for wit_x in fn_membership(x.reverse().fraction()) if not x.reverse().is_s3 else ():
                wit_y = _fn_witness_for(y, wit_x.n)
                if wit_y is not None:
                    return Verdict(
                        YES, (PairType("T6", (), pair, reversed=rev, n=wit_x.n, witness=wit_y),)
                    )
    for rev in (False, True):
        a, b = pair if not rev else (m1.reverse(), m2.reverse())
        if _fn_witness_for(a, 2) is not None and _fn_witness_for(b, 2) is not None:
            return Verdict(YES, (PairType("T7", (), pair, reversed=rev, n=2),))
    return Verdict(NO, obstruction="no-two-summand-shape")


def ribbon_leq_sum(
    y1: ConnectedSum,
    y2: ConnectedSum,
    oracle: Oracle | None = None,
    budget: search.SearchBudget | None = None,
    cache: search.EmbeddingCache | None = None,
) -> Verdict:
    """Ribbon cobordism between connected sums, by exact decomposition matching.

    Every left summand must pair with a distinct right summand (T1/T2); the
    leftover right summands split into rational-ball singletons (T3) and
    two-summand shapes (T4-T7).  Backtracking with memoization on the
    remaining multisets; an inconclusive oracle poisons only the branches
    that need it.
    """
    trace = _Trace(_resolve_oracle(oracle, budget, cache))
    report = necessary_conditions(y1, y2)
    if not report.all_pass:
        return Verdict(NO, obstruction=report.first_failure)

    memo: dict[tuple, tuple[str, tuple[PairType, ...] | None]] = {}

    def solve(rem1: tuple[LensSpace, ...], rem2: tuple[LensSpace, ...]):
        key = (rem1, rem2)
        if key in memo:
            return memo[key]
        blocked = False
        result: tuple[str, tuple[PairType, ...] | None] = (NO, None)
        if not rem1 and not rem2:
            result = (YES, ())
        elif len(rem1) > len(rem2):
            result = (NO, None)
        elif rem1:
            a, rest1 = rem1[0], rem1[1:]
            for idx, b in enumerate(rem2):
                if idx and rem2[idx] == rem2[idx - 1]:
                    continue
                rest2 = rem2[:idx] + rem2[idx + 1 :]
                for option in _first_pair_options(a, b):
                    sub, wit = solve(rest1, rest2)
                    if sub == YES:
                        result = (YES, (option,) + wit)
                        break
                    if sub == INCONCLUSIVE:
                        blocked = True
                if result[0] == YES:
                    break
        else:
            b, rest = rem2[0], rem2[1:]
            outcome = trace(b.fraction())
            if outcome == "member":
                sub, wit = solve((), rest)
                if sub == YES:
                    result = (YES, (PairType("T3", (), (b,)),) + wit)
                elif sub == INCONCLUSIVE:
                    blocked = True
            elif outcome == "inconclusive":
                blocked = True
            if result[0] != YES:
                for jdx in range(len(rest)):
                    if jdx and rest[jdx] == rest[jdx - 1]:
                        continue
                    b2 = rest[jdx]
                    pair_verdict = two_summand_ball(b, b2)
                    if not pair_verdict.yes:
                        continue
                    sub, wit = solve((), rest[:jdx] + rest[jdx + 1 :])
                    if sub == YES:
                        result = (YES, pair_verdict.witness + wit)
                        break
                    if sub == INCONCLUSIVE:
                        blocked = True
        if result[0] == NO and blocked:
            result = (INCONCLUSIVE, None)
        memo[key] = result
        return result

    answer, witness = solve(y1.summands, y2.summands)
    if answer == YES:
        return Verdict(YES, witness, oracle_trace=trace.calls)
    if answer == INCONCLUSIVE:
        return Verdict(INCONCLUSIVE, obstruction="oracle-budget", oracle_trace=trace.calls)
    return Verdict(NO, obstruction="no-decomposition", oracle_trace=trace.calls)


def replay_witness(verdict: Verdict) -> tuple[ConnectedSum, ConnectedSum]:
    """Reassemble the two sums consumed by a yes-witness (for auditing)."""
    if not verdict.yes:
        raise ValueError("only yes-verdicts carry a replayable witness")
    left: list[LensSpace] = []
    right: list[LensSpace] = []
    for pair in verdict.witness:
        left.extend(pair.left)
        right.extend(pair.right)
    return ConnectedSum.of(*left), ConnectedSum.of(*right)


# -- 2-bridge links -------------------------------------------------------------


@dataclass(frozen=True)
class TwoBridgeLink:
    """2-bridge link K(p, q): a knot iff p is odd; K(1, 0) is the unknot.

    The branched double cover of K(p, q) is L(p, q); the mirror is K(p, p-q).
    """

    p: int
    q: int

    def __post_init__(self) -> None:
        if self.p < 1:
            raise ValueError("need p >= 1")
        if not 0 <= self.q < max(self.p, 1):
            raise ValueError("parameters not normalized")
        if self.p > 1 and gcd(self.p, self.q) != 1:
            raise ValueError("parameters not coprime")

    @classmethod
    def normalize(cls, p: int, q: int) -> TwoBridgeLink:
        lens = lens_normalize(p, q)
        return cls(lens.p, lens.q)

    @property
    def is_unknot(self) -> bool:
        return self.p == 1

    @property
    def is_knot(self) -> bool:
        return self.p % 2 == 1

    def mirror(self) -> TwoBridgeLink:
        if self.is_unknot:
            return self
        return TwoBridgeLink(self.p, self.p - self.q)

    def double_cover(self) -> LensSpace:
        return LensSpace(self.p, self.q)

    def __str__(self) -> str:
        return "U" if self.is_unknot else f"K({self.p},{self.q})"


def chi_leq_bridge(
    k1: Iterable[TwoBridgeLink],
    k2: Iterable[TwoBridgeLink],
    oracle: Oracle | None = None,
    budget: search.SearchBudget | None = None,
    cache: search.EmbeddingCache | None = None,
) -> Verdict:
    """Ribbon chi-concordance between connected sums of 2-bridge links.

    Translated through double branched covers: mirroring a link reverses the
    orientation of its cover, so single-link queries reduce to the lens-space
    decision and sums to the connected-sum decision.  The returned witness is
    phrased in lens-space pairs.
    """
    links1 = tuple(k1)
    links2 = tuple(k2)
    covers1 = [link.double_cover() for link in links1 if not link.is_unknot]
    covers2 = [link.double_cover() for link in links2 if not link.is_unknot]
    if len(covers1) <= 1 and len(covers2) <= 1:
        l1 = covers1[0] if covers1 else LensSpace(1, 0)
        l2 = covers2[0] if covers2 else LensSpace(1, 0)
        return ribbon_leq_lens(l1, l2, oracle=oracle, budget=budget, cache=cache)
    return ribbon_leq_sum(
        ConnectedSum.of(*covers1),
        ConnectedSum.of(*covers2),
        oracle=oracle,
        budget=budget,
        cache=cache,
    )
