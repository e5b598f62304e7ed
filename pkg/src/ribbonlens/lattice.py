"""Exact integer-lattice kernel.

Gram matrices, Smith normal form with transforms, orthogonal complements
inside Z^N, primitivity tests, unit-summand stripping and recognition of
chain (linear) isometry types.  Everything is integer or Fraction exact;
matrices are tuples of tuples of ints.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

from .arith import CF, canonical_cf, continuant

Matrix = tuple[tuple[int, ...], ...]
Vector = tuple[int, ...]

DEFAULT_RECOGNITION_LIMIT = 24


class RecognitionLimitExceeded(Exception):
    """Raised when a lattice is too large for chain recognition.

    Deliberately distinct from a negative answer: "limit exceeded" is not
    "not a chain lattice".
    """


def identity_matrix(n: int) -> list[list[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def freeze(rows) -> Matrix:
    return tuple(tuple(r) for r in rows)


def mat_mul(a, b) -> Matrix:
    if not a or not b:
        return tuple(tuple() for _ in a)
    cols = len(b[0])
    bt = list(zip(*b))
    return tuple(
        tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a
    )


def transpose(a) -> Matrix:
    return tuple(zip(*a)) if a else ()


def dot(v: Vector, w: Vector) -> int:
    return sum(a * b for a, b in zip(v, w))


def det(matrix) -> int:
    """Exact determinant via fraction-free (Bareiss) elimination."""
    n = len(matrix)
    if n == 0:
        return 1
    a = [list(row) for row in matrix]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


@dataclass(frozen=True)
class GramLattice:
    """Abstract lattice given by a symmetric integer Gram matrix."""

    gram: Matrix

    def __post_init__(self) -> None:
        g = self.gram
        n = len(g)
        if any(len(row) != n for row in g):
            raise ValueError("Gram matrix must be square")
        for i in range(n):
            for j in range(i):
                if g[i][j] != g[j][i]:
                    raise ValueError("Gram matrix must be symmetric")

    @property
    def rank(self) -> int:
        return len(self.gram)

    def is_positive_definite(self) -> bool:
        g = self.gram
        return all(det([row[: k + 1] for row in g[: k + 1]]) > 0 for k in range(self.rank))

    def determinant(self) -> int:
        return det(self.gram)


@dataclass(frozen=True)
class EmbeddedLattice:
    """Sublattice of Z^N spanned by an ordered tuple of integer vectors.

    The vectors are required to be linearly independent over Q.
    """

    ambient_rank: int
    vectors: tuple[Vector, ...]

    def __post_init__(self) -> None:
        for v in self.vectors:
            if len(v) != self.ambient_rank:
                raise ValueError("vector length does not match ambient rank")
        if len(self.vectors) > self.ambient_rank:
            raise ValueError("more vectors than the ambient rank")
        if self.vectors and _rank(self.vectors) != len(self.vectors):
            raise ValueError("vectors are linearly dependent")

    @property
    def rank(self) -> int:
        return len(self.vectors)


@dataclass(frozen=True)
class SNFResult:
    """U * A * V = D with D diagonal, d1 | d2 | ..., U and V unimodular."""

    diagonal: tuple[int, ...]
    left: Matrix
    right: Matrix

    def diagonal_matrix(self, shape: tuple[int, int]) -> Matrix:
        m, n = shape
        return tuple(
            tuple(self.diagonal[i] if i == j and i < len(self.diagonal) else 0 for j in range(n))
            for i in range(m)
        )

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d)


def smith_normal_form(matrix) -> SNFResult:
    """Smith normal form over Z with both unimodular transforms."""
    a = [list(row) for row in matrix]
    m = len(a)
    n = len(a[0]) if m else 0
    u = identity_matrix(m)
    v = identity_matrix(n)

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(i, j, c):
        # row_i += c * row_j
        a[i] = [x + c * y for x, y in zip(a[i], a[j])]
        u[i] = [x + c * y for x, y in zip(u[i], u[j])]

    def add_col(i, j, c):
        for row in a:
            row[i] += c * row[j]
        for row in v:
            row[i] += c * row[j]

    t = 0
    while t < min(m, n):
        # smallest nonzero entry of the trailing submatrix becomes the pivot
        pivot = None
        best = None
        for i in range(t, m):
            for j in range(t, n):
                x = a[i][j]
                if x and (best is None or abs(x) < best):
                    best = abs(x)
                    pivot = (i, j)
        if pivot is None:
            break
        if pivot[0] != t:
            swap_rows(t, pivot[0])
        if pivot[1] != t:
            swap_cols(t, pivot[1])
        while True:
            restart = False
            for i in range(m):
                if i != t and a[i][t]:
                    q = a[i][t] // a[t][t]
                    add_row(i, t, -q)
                    if a[i][t]:
                        swap_rows(i, t)
                        restart = True
                        break
            if restart:
                continue
            for j in range(n):
                if j != t and a[t][j]:
                    q = a[t][j] // a[t][t]
                    add_col(j, t, -q)
                    if a[t][j]:
                        swap_cols(j, t)
                        restart = True
                        break
            if restart:
                continue
            offender = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if a[i][j] % a[t][t]:
                        offender = i
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            add_row(t, offender, 1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    diagonal = tuple(a[i][i] for i in range(min(m, n)))
    return SNFResult(diagonal, freeze(u), freeze(v))


def _rank(rows) -> int:
    return smith_normal_form(rows).rank


def gram_of(embedded: EmbeddedLattice) -> GramLattice:
    vs = embedded.vectors
    return GramLattice(tuple(tuple(dot(v, w) for w in vs) for v in vs))


def integer_kernel(rows, width: int) -> tuple[Vector, ...]:
    """Basis of {x in Z^width : A x = 0}; the span is saturated by construction."""
    if not rows:
        return tuple(tuple(1 if i == j else 0 for j in range(width)) for i in range(width))
    snf = smith_normal_form(rows)
    r = snf.rank
    cols = transpose(snf.right)
    return tuple(cols[j] for j in range(r, width))


def orthogonal_complement(embedded: EmbeddedLattice) -> EmbeddedLattice:
    """All of Z^N orthogonal to the given vectors; always a primitive sublattice."""
    basis = integer_kernel(embedded.vectors, embedded.ambient_rank)
    return EmbeddedLattice(embedded.ambient_rank, basis)


def in_span(rows, x: Vector) -> bool:
    """Is x an integer combination of the given row vectors?"""
    if not rows:
        return not any(x)
    snf = smith_normal_form(rows)
    y = mat_mul((x,), snf.right)[0]
    r = snf.rank
    for t, value in enumerate(y):
        if t < r:
            if value % snf.diagonal[t]:
                return False
        elif value:
            return False
    return True


def saturation(embedded: EmbeddedLattice) -> EmbeddedLattice:
    """(span_Q of the vectors) intersected with Z^N, via a double complement."""
    return orthogonal_complement(orthogonal_complement(embedded))


def primitivity_test(embedded: EmbeddedLattice) -> bool:
    """True iff Z^N modulo the span is torsion-free (all elementary divisors 1)."""
    if not embedded.vectors:
        return True
    snf = smith_normal_form(embedded.vectors)
    return all(d == 1 for d in snf.diagonal[: embedded.rank])


def primitivity_test_saturation(embedded: EmbeddedLattice) -> bool:
    """Independent route: the saturation must already lie in the integer span."""
    sat = saturation(embedded)
    return all(in_span(embedded.vectors, v) for v in sat.vectors)


# -- short vectors -----------------------------------------------------------


def _ldl(gram: Matrix) -> tuple[list[Fraction], list[list[Fraction]]]:
    """Quadratic completion Q(x) = sum_i c_i (x_i + sum_{j>i} u_ij x_j)^2."""
    n = len(gram)
    q = [[Fraction(x) for x in row] for row in gram]
    c = [Fraction(0)] * n
    u = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        c[i] = q[i][i]
        if c[i] <= 0:
            raise ValueError("Gram matrix is not positive definite")
        for j in range(i + 1, n):
            u[i][j] = q[i][j] / c[i]
        for k in range(i + 1, n):
            for L in range(k, n):
                q[k][L] -= c[i] * u[i][k] * u[i][L]
    return c, u


def _floor_sqrt_minus(r: Fraction, s: Fraction) -> int:
    """floor(sqrt(r) - s) for rationals r >= 0, computed exactly."""
    rn, rd = r.numerator, r.denominator
    sn, sd = s.numerator, s.denominator
    t = isqrt(rn * rd * sd * sd)
    candidate = (t - sn * rd) // (sd * rd)
    # isqrt undershoots by < 1, so at most one correction step upward
    nxt = candidate + 1
    if (nxt + s) * (nxt + s) <= r:
        candidate = nxt
    return candidate


def enumerate_short_vectors(lattice: GramLattice, bound: int) -> list[Vector]:
    """All x != 0 with x^T G x <= bound, one representative per +/- pair.

    Exact Fincke-Pohst style enumeration over the rational quadratic
    completion; rejects non-positive-definite input.
    """
    n = lattice.rank
    if n == 0:
        return []
    c, u = _ldl(lattice.gram)  # raises if not positive definite
    out: list[Vector] = []
    x = [0] * n

    def descend(i: int, remaining: Fraction, all_zero_above: bool) -> None:
        if i < 0:
            if not all_zero_above:
                out.append(tuple(x))
            return
        s = sum(u[i][j] * x[j] for j in range(i + 1, n))
        r = remaining / c[i]
        hi = _floor_sqrt_minus(r, s)
        lo = 0 if all_zero_above else -_floor_sqrt_minus(r, -s)
        for value in range(hi, lo - 1, -1):
            x[i] = value
            spent = c[i] * (value + s) * (value + s)
            descend(i - 1, remaining - spent, all_zero_above and value == 0)
        x[i] = 0

    descend(n - 1, Fraction(bound), True)
    return out


# -- unit summands and chain recognition --------------------------------------


def strip_unit_summands(lattice: GramLattice) -> tuple[int, GramLattice]:
    """Split off a maximal Z^k orthogonal summand: G = G' + Z^k, G' unit-free."""
    g = lattice
    k = 0
    while g.rank:
        units = [v for v in enumerate_short_vectors(g, 1)]
        if not units:
            break
        v = units[0]
        # norm-1 vector splits off: the lattice is Zv + (v-perp), integrally
        gv = tuple(dot(row, v) for row in g.gram)
        basis = integer_kernel((gv,), g.rank)
        gram = tuple(
            tuple(dot(a, tuple(dot(row, b) for row in g.gram)) for b in basis) for a in basis
        )
        g = GramLattice(gram)
        k += 1
    return k, g


def _chain_basis(
    lattice: GramLattice,
    terms: CF,
    shorts_by_norm: dict[int, list[Vector]],
    tick=None,
) -> tuple[Vector, ...] | None:
    """Search a basis v1..vn with v_i.v_i = terms[i], consecutive pairings 1,
    all other pairings 0.  Returns coordinates in the abstract lattice."""
    n = lattice.rank
    gram = lattice.gram
    gw_cache: dict[Vector, Vector] = {}

    def gw(w: Vector) -> Vector:
        got = gw_cache.get(w)
        if got is None:
            got = tuple(sum(gram[i][j] * w[j] for j in range(n)) for i in range(n))
            gw_cache[w] = got
        return got

    chain: list[Vector] = []
    gw_chain: list[Vector] = []

    def extend(pos: int) -> bool:
        if tick is not None:
            tick()
        if pos == n:
            return True
        wanted = terms[pos]
        candidates = shorts_by_norm.get(wanted, ())
        for base in candidates:
            for cand in ((base, tuple(-x for x in base)) if pos else (base,)):
                if pos:
                    if dot(cand, gw_chain[-1]) != 1:
                        continue
                    if any(dot(cand, gw_chain[j]) for j in range(pos - 1)):
                        continue
                chain.append(cand)
                gw_chain.append(gw(cand))
                if extend(pos + 1):
                    return True
                chain.pop()
                gw_chain.pop()
        return False

    if extend(0):
        return tuple(chain)
    return None


def chain_basis_for(lattice: GramLattice, terms: CF, tick=None) -> tuple[Vector, ...] | None:
    """Basis realizing the given chain string in the lattice, if one exists.

    The string is matched exactly up to reversal; rank and determinant are
    checked first, then a backtracking search over exact-norm short vectors.
    An optional tick callable is invoked per search step so callers can
    meter the work against their own budgets.
    """
    terms = tuple(terms)
    if lattice.rank != len(terms):
        return None
    if lattice.rank == 0:
        return ()
    if lattice.determinant() != continuant(terms):
        return None
    shorts = enumerate_short_vectors(lattice, max(terms))
    by_norm: dict[int, list[Vector]] = {}
    for v in shorts:
        norm = sum(v[i] * sum(lattice.gram[i][j] * v[j] for j in range(lattice.rank)) for i in range(lattice.rank))
        by_norm.setdefault(norm, []).append(v)
    if by_norm.get(1):
        # chain lattices with all terms >= 2 have minimum norm 2
        return None
    if any(norm not in by_norm for norm in set(terms)):
        return None
    attempts = (terms,) if terms == terms[::-1] else (terms, terms[::-1])
    for attempt in attempts:
        found = _chain_basis(lattice, attempt, by_norm, tick=tick)
        if found is not None:
            return found
    return None


def recognize_linear(lattice: GramLattice, limit: int | None = None) -> CF | None:
    """Recognize the lattice as a chain lattice, returning the canonical string.

    Requires a positive-definite input with no norm-1 vectors (strip unit
    summands first).  Returns None when no chain basis exists; raises
    RecognitionLimitExceeded above the configured rank limit, which is a
    distinct outcome from a negative answer.
    """
    limit = DEFAULT_RECOGNITION_LIMIT if limit is None else limit
    n = lattice.rank
    if n > limit:
        raise RecognitionLimitExceeded(f"rank {n} exceeds recognition limit {limit}")
    if n == 0:
        return ()
    bound = lattice.determinant()  # every chain norm is bounded by the determinant
    shorts = enumerate_short_vectors(lattice, bound)
    by_norm: dict[int, list[Vector]] = {}
    for v in shorts:
        norm = sum(v[i] * sum(lattice.gram[i][j] * v[j] for j in range(n)) for i in range(n))
        by_norm.setdefault(norm, []).append(v)
    if by_norm.get(1):
        raise ValueError("lattice has norm-1 vectors; strip unit summands first")

    gram = lattice.gram

    def gw(w: Vector) -> Vector:
        return tuple(sum(gram[i][j] * w[j] for j in range(n)) for i in range(n))

    target_det = bound
    chain: list[Vector] = []
    gw_chain: list[Vector] = []

    def extend(pos: int) -> CF | None:
        if pos == n:
            g = tuple(tuple(dot(v, gwv) for gwv in gw_chain) for v in chain)
            if det(g) == target_det:
                return tuple(g[i][i] for i in range(n))
            return None
        for norm in sorted(by_norm):
            if norm < 2:
                continue
            for base in by_norm[norm]:
                for cand in ((base, tuple(-x for x in base)) if pos else (base,)):
                    if pos:
                        if dot(cand, gw_chain[-1]) != 1:
                            continue
                        if any(dot(cand, gw_chain[j]) for j in range(pos - 1)):
                            continue
                    chain.append(cand)
                    gw_chain.append(gw(cand))
                    got = extend(pos + 1)
                    if got is not None:
                        return got
                    chain.pop()
                    gw_chain.pop()
        return None

    found = extend(0)
    return canonical_cf(found) if found is not None else None


def stably_isometric_linear(embedded: EmbeddedLattice, target: CF) -> bool:
    """Is the embedded lattice isometric to (chain of target) + Z^k, some k >= 0?"""
    k, core = strip_unit_summands(gram_of(embedded))
    target = tuple(target)
    if not target:
        return core.rank == 0
    return chain_basis_for(core, target) is not None
