"""Combinatorics of linear subsets of Z^N.

A linear subset is an ordered tuple of integer vectors realizing a chain
Gram pattern (norms >= 2, consecutive pairings 0 or 1, all other pairings
zero).  This module implements the move calculus on such subsets:
contractions, 2-final expansions, intersection graphs, linkedness,
irreducibility and bad-component detection with complement computation.
"""

from __future__ import annotations

from dataclasses import dataclass

from .lattice import EmbeddedLattice, Matrix, Vector, dot, orthogonal_complement, stably_isometric_linear


@dataclass(frozen=True)
class LinearSubset:
    """Ordered vectors in Z^N with a chain pairing pattern.

    Cardinality below the ambient rank is allowed; a subset standing for a
    full-rank configuration has cardinality equal to the ambient rank (see
    :attr:`full`).  Construct through :func:`linear_subset` to get pairing
    validation.
    """

    ambient_rank: int
    vectors: tuple[Vector, ...]

    @property
    def full(self) -> bool:
        return len(self.vectors) == self.ambient_rank

    @property
    def size(self) -> int:
        return len(self.vectors)


def _pairing_violation(vectors: tuple[Vector, ...]) -> str | None:
    for i, v in enumerate(vectors):
        if dot(v, v) < 2:
            return f"vector {i} has norm {dot(v, v)} < 2"
    for i in range(len(vectors)):
        for j in range(i + 1, len(vectors)):
            p = dot(vectors[i], vectors[j])
            if j == i + 1:
                if p not in (0, 1):
                    return f"adjacent pairing v{i}.v{j} = {p} not in {{0, 1}}"
            elif p != 0:
                return f"distant pairing v{i}.v{j} = {p} != 0"
    return None


def is_linear_subset(vectors) -> bool:
    vectors = tuple(tuple(v) for v in vectors)
    return _pairing_violation(vectors) is None


def linear_subset(vectors, ambient_rank: int | None = None) -> LinearSubset:
    vectors = tuple(tuple(v) for v in vectors)
    if ambient_rank is None:
        if not vectors:
            raise ValueError("ambient rank required for an empty subset")
        ambient_rank = len(vectors[0])
    for v in vectors:
        if len(v) != ambient_rank:
            raise ValueError("vector length does not match ambient rank")
    if len(vectors) > ambient_rank:
        raise ValueError("more vectors than coordinates")
    reason = _pairing_violation(vectors)
    if reason is not None:
        raise ValueError(f"not a linear subset: {reason}")
    return LinearSubset(ambient_rank, vectors)


def core_triple(m: int, ambient_rank: int | None = None) -> LinearSubset:
    """The minimal bad-component triple with central norm m + 1 in Z^(m+2)."""
    if m < 2:
        raise ValueError("central norm m + 1 needs m >= 2")
    n = m + 2 if ambient_rank is None else ambient_rank
    if n < m + 2:
        raise ValueError("ambient rank too small for the triple")
    e = lambda i: tuple(1 if j == i else 0 for j in range(n))

    def add(*vs):
        return tuple(sum(col) for col in zip(*vs))

    v_mid = tuple(1 if j <= m else 0 for j in range(n))
    v_left = add(e(m), e(m + 1))
    v_right = tuple(a - 2 * b for a, b in zip(v_left, e(m + 1)))
    return linear_subset([v_left, v_mid, v_right], n)


@dataclass(frozen=True)
class IntersectionGraph:
    """One vertex per subset element, an edge where the pairing equals 1."""

    edges: tuple[tuple[int, int], ...]
    components: tuple[tuple[int, ...], ...]

    @property
    def c(self) -> int:
        return len(self.components)


def intersection_graph(subset: LinearSubset) -> IntersectionGraph:
    vecs = subset.vectors
    edges = tuple(
        (i, i + 1) for i in range(len(vecs) - 1) if dot(vecs[i], vecs[i + 1]) == 1
    )
    components = []
    run = []
    for i in range(len(vecs)):
        run.append(i)
        if i == len(vecs) - 1 or dot(vecs[i], vecs[i + 1]) != 1:
            components.append(tuple(run))
            run = []
    return IntersectionGraph(edges, tuple(components))


def _degrees(subset: LinearSubset) -> list[int]:
    vecs = subset.vectors
    deg = [0] * len(vecs)
    for i in range(len(vecs) - 1):
        if dot(vecs[i], vecs[i + 1]) == 1:
            deg[i] += 1
            deg[i + 1] += 1
    return deg


def linked(v: Vector, w: Vector) -> bool:
    """Two vectors are linked when some coordinate is nonzero in both."""
    return any(a and b for a, b in zip(v, w))


def irreducible_components(subset: LinearSubset) -> tuple[tuple[int, ...], ...]:
    """Partition into maximal irreducible pieces (transitive closure of linkedness)."""
    n = subset.size
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for j in range(subset.ambient_rank):
        users = [i for i in range(n) if subset.vectors[i][j]]
        for a, b in zip(users, users[1:]):
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb
    blocks: dict[int, list[int]] = {}
    for i in range(n):
        blocks.setdefault(find(i), []).append(i)
    return tuple(tuple(sorted(b)) for b in sorted(blocks.values()))


def is_irreducible(subset: LinearSubset) -> bool:
    return len(irreducible_components(subset)) <= 1


# -- canonical form under signed coordinate permutations ----------------------


def canonical_matrix(vectors: tuple[Vector, ...]) -> Matrix:
    """Order-preserving canonical form: sign-fix every column so its first
    nonzero entry is positive, then sort columns.  Two subsets with the same
    vector order are related by a signed coordinate permutation iff their
    canonical matrices agree."""
    if not vectors:
        return ()
    cols = []
    for j in range(len(vectors[0])):
        col = tuple(v[j] for v in vectors)
        for x in col:
            if x:
                if x < 0:
                    col = tuple(-y for y in col)
                break
        cols.append(col)
    cols.sort()
    return tuple(zip(*cols))


def subset_key(subset: LinearSubset):
    return (subset.ambient_rank, canonical_matrix(subset.vectors))


def equivalent_subsets(a: LinearSubset, b: LinearSubset) -> bool:
    """Equality up to a signed permutation of coordinates (vector order fixed)."""
    return subset_key(a) == subset_key(b)


# -- contractions and 2-final expansions --------------------------------------


def contract(subset: LinearSubset, h: int, s: int, t: int) -> LinearSubset:
    """Remove vector s, strip coordinate h from vector t, drop coordinate h.

    Preconditions reported individually: unit coefficient bound, central norm
    above 2, and coordinate h supported on exactly {s, t}.
    """
    vecs = subset.vectors
    if s == t:
        raise ValueError("contraction needs distinct indices s and t")
    for i, v in enumerate(vecs):
        for j, coeff in enumerate(v):
            if abs(coeff) > 1:
                raise ValueError(f"coefficient bound violated: |v{i}[{j}]| = {abs(coeff)} > 1")
    if dot(vecs[t], vecs[t]) <= 2:
        raise ValueError(f"norm bound violated: v{t}.v{t} = {dot(vecs[t], vecs[t])} <= 2")
    support = tuple(i for i, v in enumerate(vecs) if v[h])
    if support != tuple(sorted((s, t))):
        raise ValueError(
            f"coordinate support condition violated: e_{h} meets {support}, expected {tuple(sorted((s, t)))}"
        )
    new_t = tuple(0 if j == h else x for j, x in enumerate(vecs[t]))
    rows = []
    for i, v in enumerate(vecs):
        if i == s:
            continue
        row = new_t if i == t else v
        rows.append(tuple(x for j, x in enumerate(row) if j != h))
    reason = _pairing_violation(tuple(rows))
    if reason is not None:
        raise ValueError(f"contraction result is not a linear subset: {reason}")
    return LinearSubset(subset.ambient_rank - 1, tuple(rows))


def _two_final_moves(subset: LinearSubset, component: tuple[int, ...]):
    """All (h, s, t) giving a 2-final contraction inside the given component."""
    vecs = subset.vectors
    if any(abs(c) > 1 for v in vecs for c in v):
        return
    deg = _degrees(subset)
    comp = set(component)
    for h in range(subset.ambient_rank):
        support = [i for i, v in enumerate(vecs) if v[h]]
        if len(support) != 2 or not set(support) <= comp:
            continue
        for s, t in (support, support[::-1]):
            if deg[s] != 1 or deg[t] != 1:
                continue
            if dot(vecs[s], vecs[s]) == 2 and dot(vecs[t], vecs[t]) > 2:
                yield h, s, t


def two_final_expansions(subset: LinearSubset, component: tuple[int, ...]) -> list[LinearSubset]:
    """Every linear subset in Z^(N+1) reachable by one 2-final expansion of the
    component.  The fresh coordinate is appended last with canonical sign, so
    the enumeration is exhaustive up to signed coordinate permutation."""
    n = subset.ambient_rank
    vecs = subset.vectors
    if any(abs(c) > 1 for v in vecs for c in v):
        return []
    deg = _degrees(subset)
    comp = tuple(component)
    comp_set = set(comp)
    graph = intersection_graph(subset)
    runs = {c: (c[0], c[-1]) for c in graph.components}

    results: list[LinearSubset] = []
    seen = set()
    for t_pos in comp:
        if deg[t_pos] > 1:
            continue
        w = vecs[t_pos]
        for eps in (1, -1):
            v_t = tuple(w) + (eps,)
            for c in range(n):
                for sigma in (1, -1):
                    v_s = tuple(sigma if j == c else 0 for j in range(n)) + (1,)
                    # pairings of the new vector against the modified set
                    pair_t = eps + sigma * w[c]
                    pairs = {}
                    ok = True
                    for j, v in enumerate(vecs):
                        p = pair_t if j == t_pos else sigma * v[c]
                        if p not in (0, 1):
                            ok = False
                            break
                        if p:
                            pairs[j] = p
                    if not ok or len(pairs) != 1:
                        continue
                    neighbor = next(iter(pairs))
                    if neighbor not in comp_set:
                        continue
                    # the modified target must end up with degree exactly 1
                    if deg[t_pos] + (1 if neighbor == t_pos else 0) != 1:
                        continue
                    extended = [tuple(v) + (0,) for v in vecs]
                    extended[t_pos] = v_t
                    lo, hi = next(r for comp_run, r in runs.items() if neighbor in comp_run)
                    if neighbor == lo:
                        insert_at = lo
                    elif neighbor == hi:
                        insert_at = hi + 1
                    else:
                        continue
                    extended.insert(insert_at, v_s)
                    rows = tuple(extended)
                    if _pairing_violation(rows) is not None:
                        continue
                    candidate = LinearSubset(n + 1, rows)
                    key = subset_key(candidate)
                    if key in seen:
                        continue
                    seen.add(key)
                    results.append(candidate)
    return results


# -- bad components ------------------------------------------------------------


@dataclass(frozen=True)
class BadComponent:
    """A component contractible to a norm-(m+1)-centered triple.

    ``trace`` lists the 2-final contractions (h, s, t), each in the index
    convention of the state it was applied to; ``core`` is the fully
    contracted subset and ``core_positions`` the triple inside it.
    """

    component: tuple[int, ...]
    central_norm: int
    core: LinearSubset
    core_positions: tuple[int, int, int]
    trace: tuple[tuple[int, int, int], ...]

    @property
    def m(self) -> int:
        return self.central_norm - 1


def _triple_witness(subset: LinearSubset, comp: tuple[int, ...]):
    if len(comp) != 3:
        return None
    x, y, z = comp
    vecs = subset.vectors
    if dot(vecs[x], vecs[x]) != 2 or dot(vecs[z], vecs[z]) != 2:
        return None
    if dot(vecs[y], vecs[y]) <= 2:
        return None
    for j in range(subset.ambient_rank):
        support = tuple(i for i, v in enumerate(vecs) if v[j])
        if support == (x, y, z):
            return dot(vecs[y], vecs[y])
    return None


def detect_bad_components(subset: LinearSubset) -> list[BadComponent]:
    """Bad components of the subset, each with a contraction trace to its core."""
    out = []
    for comp in intersection_graph(subset).components:
        if len(comp) < 3:
            continue
        witness = _search_bad(subset, comp)
        if witness is not None:
            core, positions, trace, norm = witness
            out.append(BadComponent(comp, norm, core, positions, trace))
    return out


def _search_bad(subset: LinearSubset, comp: tuple[int, ...]):
    seen = set()
    stack = [(subset, tuple(comp), ())]
    while stack:
        cur, cpos, trace = stack.pop()
        key = (subset_key(cur), cpos)
        if key in seen:
            continue
        seen.add(key)
        norm = _triple_witness(cur, cpos)
        if norm is not None:
            return cur, cpos, trace, norm
        if len(cpos) == 3:
            continue  # contractions only shrink; no way back up to a triple
        for h, s, t in _two_final_moves(cur, cpos):
            nxt = contract(cur, h, s, t)
            new_cpos = tuple(sorted(p if p < s else p - 1 for p in cpos if p != s))
            stack.append((nxt, new_cpos, trace + ((h, s, t),)))
    return None


def b_count(subset: LinearSubset) -> int:
    return len(detect_bad_components(subset))


def bad_component_complement(subset: LinearSubset, bad: BadComponent) -> EmbeddedLattice:
    """Orthogonal complement of the bad component's span inside Z^N.

    The result is always stably isometric to the chain of (m - 1) twos; this
    is checked before returning.
    """
    component_vectors = tuple(subset.vectors[i] for i in bad.component)
    embedded = EmbeddedLattice(subset.ambient_rank, component_vectors)
    complement = orthogonal_complement(embedded)
    expected = (2,) * (bad.m - 1)
    if not stably_isometric_linear(complement, expected):
        raise RuntimeError(
            f"bad-component complement is not stably the chain of {bad.m - 1} twos"
        )
    return complement
