import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ribbonlens.lattice import (
    EmbeddedLattice,
    GramLattice,
    RecognitionLimitExceeded,
    chain_basis_for,
    det,
    enumerate_short_vectors,
    freeze,
    gram_of,
    in_span,
    integer_kernel,
    mat_mul,
    orthogonal_complement,
    primitivity_test,
    primitivity_test_saturation,
    recognize_linear,
    saturation,
    smith_normal_form,
    stably_isometric_linear,
    strip_unit_summands,
)


@st.composite
def integer_matrices(draw, max_dim=5, lo=-6, hi=6):
    m = draw(st.integers(min_value=1, max_value=max_dim))
    n = draw(st.integers(min_value=1, max_value=max_dim))
    return tuple(
        tuple(draw(st.integers(min_value=lo, max_value=hi)) for _ in range(n))
        for _ in range(m)
    )


@st.composite
def sublattices(draw, max_dim=5):
    n = draw(st.integers(min_value=1, max_value=max_dim))
    k = draw(st.integers(min_value=1, max_value=n))
    rows = tuple(
        tuple(draw(st.integers(min_value=-3, max_value=3)) for _ in range(n))
        for _ in range(k)
    )
    if smith_normal_form(rows).rank != k:
        return EmbeddedLattice(n, rows[:0])
    return EmbeddedLattice(n, rows)


def random_unimodular(rng, n):
    rows = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    for _ in range(3 * n):
        i, j = rng.randrange(n), rng.randrange(n)
        if i == j:
            continue
        c = rng.choice((-2, -1, 1, 2))
        rows[i] = [a + c * b for a, b in zip(rows[i], rows[j])]
    return freeze(rows)


class TestSmithNormalForm:
    def test_examples(self):
        assert smith_normal_form(((2,),)).diagonal == (2,)
        assert smith_normal_form(((1, 0, 0), (0, 1, 0), (0, 0, 1))).diagonal == (1, 1, 1)
        assert smith_normal_form(((2, 0), (0, 3))).diagonal == (1, 6)

    @given(integer_matrices())
    def test_reconstruction_and_unimodularity(self, matrix):
        snf = smith_normal_form(matrix)
        m, n = len(matrix), len(matrix[0])
        assert mat_mul(mat_mul(snf.left, matrix), snf.right) == snf.diagonal_matrix((m, n))
        assert abs(det(snf.left)) == 1
        assert abs(det(snf.right)) == 1
        diag = snf.diagonal
        assert all(d >= 0 for d in diag)
        for a, b in zip(diag, diag[1:]):
            if a:
                assert b % a == 0
            else:
                assert b == 0


class TestComplementAndPrimitivity:
    def test_gram_examples(self):
        assert gram_of(EmbeddedLattice(1, ((1,),))).gram == ((1,),)
        assert gram_of(EmbeddedLattice(3, ((1, 1, 0), (0, 1, -1)))).gram == ((2, 1), (1, 2))
        assert gram_of(EmbeddedLattice(1, ((2,),))).gram == ((4,),)

    def test_complement_examples(self):
        comp = orthogonal_complement(EmbeddedLattice(2, ((1, 1),)))
        assert gram_of(comp).gram == ((2,),)
        assert orthogonal_complement(EmbeddedLattice(1, ((1,),))).rank == 0

    def test_triple_complement_from_minimal_bad_component(self):
        # central norm 3 in ambient rank 4: complement is a single norm-2
        # vector, the chain of one two
        triple = EmbeddedLattice(4, ((0, 0, 1, 1), (1, 1, 1, 0), (0, 0, 1, -1)))
        comp = orthogonal_complement(triple)
        assert comp.rank == 1
        assert stably_isometric_linear(comp, (2,))

    def test_primitivity_examples(self):
        assert not primitivity_test(EmbeddedLattice(1, ((2,),)))
        assert primitivity_test(EmbeddedLattice(2, ((1, 1),)))

    @given(sublattices())
    def test_two_routes_agree(self, embedded):
        assert primitivity_test(embedded) == primitivity_test_saturation(embedded)

    @given(sublattices())
    def test_complements_are_primitive(self, embedded):
        comp = orthogonal_complement(embedded)
        assert primitivity_test(comp)
        assert primitivity_test_saturation(comp)

    @given(sublattices())
    def test_double_complement_is_saturation(self, embedded):
        sat = saturation(embedded)
        assert sat.rank == embedded.rank
        # the saturation contains the lattice; primitivity means equality
        for v in embedded.vectors:
            assert in_span(sat.vectors, v)
        if primitivity_test(embedded):
            for v in sat.vectors:
                assert in_span(embedded.vectors, v)

    def test_full_rank_primitive_is_everything(self):
        rng = random.Random(7)
        for n in (1, 2, 3, 4):
            for _ in range(10):
                u = random_unimodular(rng, n)
                embedded = EmbeddedLattice(n, u)
                assert primitivity_test(embedded)
                assert stably_isometric_linear(embedded, ())

    def test_kernel_of_nothing_is_everything(self):
        assert integer_kernel((), 3) == ((1, 0, 0), (0, 1, 0), (0, 0, 1))


class TestShortVectors:
    def test_examples(self):
        assert enumerate_short_vectors(GramLattice(((2,),)), 2) == [(1,)]
        assert sorted(enumerate_short_vectors(GramLattice(((1, 0), (0, 1))), 1)) == [(0, 1), (1, 0)]
        found = sorted(enumerate_short_vectors(GramLattice(((2, 1), (1, 2))), 2))
        assert found == [(-1, 1), (0, 1), (1, 0)]

    def test_rejects_indefinite(self):
        with pytest.raises(ValueError):
            enumerate_short_vectors(GramLattice(((0, 1), (1, 0))), 2)
        with pytest.raises(ValueError):
            enumerate_short_vectors(GramLattice(((-2,),)), 2)

    @given(st.integers(min_value=1, max_value=12))
    def test_counts_on_square_lattice(self, bound):
        # Z^2 norms are sums of two squares; count one vector per +/- pair
        lattice = GramLattice(((1, 0), (0, 1)))
        found = enumerate_short_vectors(lattice, bound)
        brute = set()
        for x in range(-4, 5):
            for y in range(-4, 5):
                if (x, y) != (0, 0) and x * x + y * y <= bound:
                    brute.add(max((x, y), (-x, -y)))
        assert len(found) == len(brute)
        assert {max(v, tuple(-c for c in v)) for v in found} == brute


class TestUnitSummands:
    def test_examples(self):
        assert strip_unit_summands(GramLattice(((1,),)))[0] == 1
        k, core = strip_unit_summands(GramLattice(((2, 1), (1, 2))))
        assert (k, core.gram) == (0, ((2, 1), (1, 2)))
        k, core = strip_unit_summands(GramLattice(((1, 0, 0), (0, 1, 0), (0, 0, 3))))
        assert (k, core.gram) == (2, ((3,),))


class TestStripRoundTrip:
    @given(
        st.sampled_from([(2,), (3,), (2, 2), (2, 3), (4, 2, 2), (2, 2, 2)]),
        st.integers(min_value=0, max_value=2),
        st.integers(min_value=0, max_value=2**30),
    )
    def test_strip_recovers_planted_units(self, terms, units, seed):
        # plant G = P (I_k + chain) P^t with P unimodular; stripping must
        # recover exactly k units and a core isometric to the chain
        rng = random.Random(seed)
        n = units + len(terms)
        gram = [[0] * n for _ in range(n)]
        for i in range(units):
            gram[i][i] = 1
        for i, a in enumerate(terms):
            gram[units + i][units + i] = a
            if i + 1 < len(terms):
                gram[units + i][units + i + 1] = gram[units + i + 1][units + i] = 1
        u = random_unimodular(rng, n)
        conjugated = freeze(mat_mul(mat_mul(u, freeze(gram)), tuple(zip(*u))))
        k, core = strip_unit_summands(GramLattice(conjugated))
        assert k == units
        assert core.determinant() == det(gram)
        assert chain_basis_for(core, terms) is not None


class TestRecognition:
    def test_examples(self):
        assert recognize_linear(GramLattice(((2, 1), (1, 2)))) == (2, 2)
        assert recognize_linear(GramLattice(((3,),))) == (3,)
        assert recognize_linear(GramLattice(((2, 0), (0, 2)))) is None

    def test_limit_is_a_distinct_outcome(self):
        big = GramLattice(tuple(tuple(2 if i == j else 0 for j in range(5)) for i in range(5)))
        with pytest.raises(RecognitionLimitExceeded):
            recognize_linear(big, limit=4)

    def test_requires_stripped_input(self):
        with pytest.raises(ValueError):
            recognize_linear(GramLattice(((1, 0), (0, 2))))

    @given(st.sampled_from([(2, 2), (3,), (2, 3), (4, 2, 2), (2, 2, 2), (5, 3)]), st.integers(0, 2**30))
    def test_invariant_under_unimodular_conjugation(self, terms, seed):
        from ribbonlens.arith import canonical_cf

        rng = random.Random(seed)
        n = len(terms)
        gram = [[0] * n for _ in range(n)]
        for i, a in enumerate(terms):
            gram[i][i] = a
            if i + 1 < n:
                gram[i][i + 1] = gram[i + 1][i] = 1
        u = random_unimodular(rng, n)
        conjugated = mat_mul(mat_mul(u, freeze(gram)), tuple(zip(*u)))
        assert recognize_linear(GramLattice(freeze(conjugated))) == canonical_cf(terms)

    def test_chain_basis_for_targets(self):
        a3 = GramLattice(((2, 1, 0), (1, 2, 1), (0, 1, 2)))
        assert chain_basis_for(a3, (2, 2, 2)) is not None
        assert chain_basis_for(a3, (2, 2)) is None
        assert chain_basis_for(a3, (2, 2, 3)) is None

    def test_stably_isometric_examples(self):
        assert stably_isometric_linear(EmbeddedLattice(4, ((1, -1, 0, 0), (0, 0, 0, 1))), (2,))
        assert stably_isometric_linear(EmbeddedLattice(1, ((1,),)), ())
        assert not stably_isometric_linear(EmbeddedLattice(1, ((2,),)), ())
