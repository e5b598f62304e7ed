"""Exact arithmetic on lens-space parameters and negative continued fractions.

All values are plain integers or ``fractions.Fraction``; nothing in this
module (or the rest of the package) ever touches floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt
from typing import Iterable, NamedTuple

# A negative continued fraction string [a1,...,an]^- with every term >= 2.
# The empty tuple is the rank-0 string (the value attached to S^3).
CF = tuple[int, ...]


def is_perfect_square(n: int) -> bool:
    if n < 0:
        return False
    r = isqrt(n)
    return r * r == n


class FnWitness(NamedTuple):
    """Witness (n, m, k) that p/q = n*m**2 / (n*m*k + 1) with m > k > 0 coprime."""

    n: int
    m: int
    k: int

    def fraction(self) -> Fraction:
        return Fraction(self.n * self.m * self.m, self.n * self.m * self.k + 1)


@dataclass(frozen=True, order=True)
class LensSpace:
    """Normalized oriented lens-space parameters: p >= 1, 0 <= q < p, coprime.

    The pair (1, 0) is the 3-sphere.  Orientation reversal is always done
    through :meth:`reverse`, never by storing a negative q.
    """

    p: int
    q: int

    def __post_init__(self) -> None:
        if self.p < 1:
            raise ValueError(f"lens space needs p >= 1, got p={self.p}")
        if not 0 <= self.q < max(self.p, 1):
            raise ValueError(f"lens space parameters not normalized: ({self.p}, {self.q})")
        if self.q == 0 and self.p != 1:
            raise ValueError(f"q = 0 requires p = 1, got p={self.p}")
        if gcd(self.p, self.q) != 1 and not self.is_s3:
            raise ValueError(f"parameters not coprime: ({self.p}, {self.q})")

    @property
    def is_s3(self) -> bool:
        return self.p == 1

    def fraction(self) -> Fraction | None:
        """The surgery fraction p/q, or None for S^3 (rank-0 sentinel)."""
        if self.is_s3:
            return None
        return Fraction(self.p, self.q)

    def reverse(self) -> LensSpace:
        """Orientation reversal: -L(p, q) = L(p, p - q)."""
        if self.is_s3:
            return self
        return LensSpace(self.p, self.p - self.q)

    def cf(self) -> CF:
        """Negative continued fraction string of p/q (empty for S^3)."""
        if self.is_s3:
            return ()
        return cf_expand(Fraction(self.p, self.q))

    def __str__(self) -> str:
        return "S3" if self.is_s3 else f"L({self.p},{self.q})"


def lens_normalize(p: int, q: int) -> LensSpace:
    """Reduce (p, q) to the canonical representative with 0 <= q < p."""
    if p < 1:
        raise ValueError(f"not a rational homology sphere parameter: p={p}")
    q %= p
    if p == 1:
        return LensSpace(1, 0)
    if gcd(p, q) != 1:
        raise ValueError(f"parameters not coprime: ({p}, {q})")
    return LensSpace(p, q)


def lens_reverse(lens: LensSpace) -> LensSpace:
    return lens.reverse()


def lens_homeomorphic(a: LensSpace, b: LensSpace, oriented: bool = True) -> bool:
    """Homeomorphism test: q2 = q1 or q1*q2 = 1 (mod p); unoriented also allows
    q2 = -q1 or q1*q2 = -1 (mod p)."""
    if a.p != b.p:
        return False
    p = a.p
    if a.q == b.q or (a.q * b.q - 1) % p == 0:
        return True
    if not oriented:
        if (a.q + b.q) % p == 0 or (a.q * b.q + 1) % p == 0:
            return True
    return False


def cf_expand(f: Fraction) -> CF:
    """Expand f > 1 as [a1,...,an]^- = a1 - 1/(a2 - 1/(...)), all terms >= 2.

    The expansion with every term >= 2 is unique.
    """
    if f <= 1:
        raise ValueError(f"negative continued fraction expansion needs f > 1, got {f}")
    p, q = f.numerator, f.denominator
    terms = []
    while q > 0:
        a = -(-p // q)  # ceil(p / q)
        terms.append(a)
        p, q = q, a * q - p
    return tuple(terms)


def cf_evaluate(terms: Iterable[int]) -> Fraction | None:
    """Evaluate [a1,...,an]^-; the empty string yields the rank-0 sentinel None."""
    value: Fraction | None = None
    for a in reversed(tuple(terms)):
        value = Fraction(a) if value is None else a - 1 / value
    return value


def continuant(terms: Iterable[int]) -> int:
    """Numerator of [a1,...,an]^-, i.e. the Gram determinant of the chain lattice."""
    value = cf_evaluate(terms)
    return 1 if value is None else value.numerator


def canonical_cf(terms: Iterable[int]) -> CF:
    """Canonical representative of a string under reversal (lexicographic min)."""
    t = tuple(terms)
    return min(t, t[::-1])


def fn_membership(f: Fraction) -> list[FnWitness]:
    """All witnesses (n, m, k), n >= 2, with f = n*m**2 / (n*m*k + 1).

    An empty list certifies that f lies in no such family.
    """
    p, q = f.numerator, f.denominator
    if not p > q > 0:
        raise ValueError(f"need p > q > 0, got {f}")
    found = []
    m = 2
    while m * m <= p:
        if p % (m * m) == 0:
            n = p // (m * m)
            if n >= 2 and q > 1 and (q - 1) % (n * m) == 0:
                k = (q - 1) // (n * m)
                if 0 < k < m and gcd(m, k) == 1:
                    found.append(FnWitness(n, m, k))
        m += 1
    return sorted(found)


def _lens_iter(y) -> Iterable[LensSpace]:
    if isinstance(y, LensSpace):
        return (y,)
    summands = getattr(y, "summands", None)
    if summands is not None:
        return summands
    return tuple(y)


def h1_order(y) -> int:
    """Order of the first homology: the product of the summands' p values."""
    order = 1
    for lens in _lens_iter(y):
        order *= lens.p
    return order


def square_ratio_check(y1, y2) -> bool:
    """True iff |H1(Y2)| = u**2 * |H1(Y1)| for some integer u >= 1.

    A failure obstructs any ribbon cobordism from Y1 to Y2.
    """
    n1 = h1_order(y1)
    n2 = h1_order(y2)
    return n2 % n1 == 0 and is_perfect_square(n2 // n1)
