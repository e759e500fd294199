"""Tests for Latin square construction, orthogonality and pattern queries."""

import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from latinmac.errors import ConstructionUnsupported, InvalidArgument
from latinmac.latin import (
    LatinRectangle,
    LatinSquare,
    OrthogonalFamily,
    cyclic_square,
    dumps,
    is_orthogonal,
    is_prime,
    loads,
    mols_family,
    next_prime,
    symbol_positions,
    truncate,
)

E = [[1, 2, 3], [2, 3, 1], [3, 1, 2]]
F = [[1, 2, 3], [3, 1, 2], [2, 3, 1]]

SMALL_PRIMES = [2, 3, 5, 7, 11, 13]
primes = st.sampled_from(SMALL_PRIMES)


class TestPrimes:
    def test_is_prime_small(self):
        assert [n for n in range(30) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]

    @pytest.mark.parametrize("n,p", [(0, 2), (1, 2), (2, 2), (12, 13), (14, 17), (24, 29), (30, 31)])
    def test_next_prime(self, n, p):
        assert next_prime(n) == p


class TestCyclicSquare:
    def test_order3_multiplier1_is_E(self):
        assert cyclic_square(3, 1).tolist() == E

    def test_order3_multiplier2_is_F(self):
        assert cyclic_square(3, 2).tolist() == F

    def test_order2(self):
        assert cyclic_square(2, 1).tolist() == [[1, 2], [2, 1]]

    def test_composite_order_refused(self):
        with pytest.raises(ConstructionUnsupported):
            cyclic_square(4, 1)

    @pytest.mark.parametrize("a", [0, 5, -1])
    def test_multiplier_out_of_range(self, a):
        with pytest.raises(InvalidArgument):
            cyclic_square(5, a)

    @given(primes, st.data())
    def test_is_latin(self, K, data):
        a = data.draw(st.integers(1, max(K - 1, 1)))
        sq = cyclic_square(K, a)
        assert sq.order == K
        assert sq.is_valid()
        for row in sq.tolist():
            assert sorted(row) == list(range(1, K + 1))

    def test_cells_are_read_only(self):
        sq = cyclic_square(5, 2)
        with pytest.raises(ValueError):
            sq.cells[0, 0] = 9


class TestOrthogonality:
    def test_E_F_orthogonal(self):
        assert is_orthogonal(LatinSquare.from_rows(E), LatinSquare.from_rows(F))

    def test_square_not_orthogonal_to_itself(self):
        e = LatinSquare.from_rows(E)
        assert not is_orthogonal(e, e)

    def test_order7_family_all_pairs(self):
        fam = mols_family(7)
        for A, B in itertools.combinations(fam, 2):
            pairs = {(A[i, j], B[i, j]) for i in range(7) for j in range(7)}
            assert len(pairs) == 49
            assert is_orthogonal(A, B)

    def test_order_mismatch(self):
        with pytest.raises(InvalidArgument):
            is_orthogonal(cyclic_square(3, 1), cyclic_square(5, 1))


class TestFamily:
    def test_order3_is_E_and_F(self):
        fam = mols_family(3)
        assert [sq.tolist() for sq in fam] == [E, F]

    def test_order5_pairs(self):
        fam = mols_family(5)
        assert len(fam) == 4
        assert all(is_orthogonal(A, B) for A, B in itertools.combinations(fam, 2))

    def test_order6_unsupported(self):
        with pytest.raises(ConstructionUnsupported):
            mols_family(6)

    def test_family_size_limit(self):
        sq = cyclic_square(3, 1)
        with pytest.raises(InvalidArgument):
            OrthogonalFamily(3, (sq, sq, sq))


class TestTruncate:
    def test_keeps_small_square(self):
        e = LatinSquare.from_rows(E)
        r = truncate(e, 16)
        assert r.rows == 3 and r.cols == 3 and r == e

    def test_order20_to_16_rows(self):
        r = truncate(mols_family(23)[0], 16)
        assert (r.rows, r.cols, r.parent_order) == (16, 23, 23)

    def test_order12_keeps_12_rows(self):
        sq = LatinSquare(cells=(np.arange(12)[:, None] + np.arange(12)[None, :]) % 12 + 1, parent_order=12)
        r = truncate(sq, 16)
        assert (r.rows, r.cols) == (12, 12)

    def test_bad_channel_count(self):
        with pytest.raises(InvalidArgument):
            truncate(cyclic_square(3, 1), 0)

    @given(primes, st.integers(1, 20), st.data())
    def test_truncation_is_latin_rectangle(self, K, M, data):
        a = data.draw(st.integers(1, max(K - 1, 1)))
        r = truncate(cyclic_square(K, a), M)
        assert r.rows == min(M, K)
        assert r.is_valid()


class TestSymbolPositions:
    def test_symbol2_in_E(self):
        assert symbol_positions(LatinSquare.from_rows(E), 2).positions == ((0, 1), (1, 0), (2, 2))

    def test_symbol1_in_E(self):
        assert symbol_positions(LatinSquare.from_rows(E), 1).positions == ((0, 0), (1, 2), (2, 1))

    def test_symbol_out_of_range(self):
        with pytest.raises(InvalidArgument):
            symbol_positions(LatinSquare.from_rows(E), 4)

    @settings(max_examples=60)
    @given(primes, st.integers(1, 20), st.data())
    def test_pattern_shape(self, K, M, data):
        a = data.draw(st.integers(1, max(K - 1, 1)))
        s = data.draw(st.integers(1, K))
        r = truncate(cyclic_square(K, a), M)
        p = symbol_positions(r, s)
        assert len(p) == r.rows
        assert len({i for i, _ in p}) == len(p)
        assert len({j for _, j in p}) == len(p)
        assert all(r[i, j] == s for i, j in p)

    @settings(max_examples=40)
    @given(st.sampled_from([3, 5, 7, 11]), st.integers(1, 16), st.data())
    def test_same_rectangle_patterns_disjoint(self, K, M, data):
        a = data.draw(st.integers(1, K - 1))
        s, t = data.draw(st.lists(st.integers(1, K), min_size=2, max_size=2, unique=True))
        r = truncate(cyclic_square(K, a), M)
        assert not set(symbol_positions(r, s)) & set(symbol_positions(r, t))

    @settings(max_examples=40)
    @given(st.sampled_from([3, 5, 7, 11]), st.integers(1, 16), st.data())
    def test_cross_rectangle_overlap(self, K, M, data):
        a, b = data.draw(st.lists(st.integers(1, K - 1), min_size=2, max_size=2, unique=True))
        e, f = data.draw(st.integers(1, K)), data.draw(st.integers(1, K))
        ra, rb = truncate(cyclic_square(K, a), M), truncate(cyclic_square(K, b), M)
        shared = len(set(symbol_positions(ra, e)) & set(symbol_positions(rb, f)))
        if M >= K:
            assert shared == 1
        else:
            assert shared <= 1


class TestTextFormat:
    def test_dump_header(self):
        assert dumps(LatinSquare.from_rows(E)) == "latin 3 3 3\n1 2 3\n2 3 1\n3 1 2\n"

    @given(primes, st.integers(1, 20), st.data())
    def test_round_trip(self, K, M, data):
        a = data.draw(st.integers(1, max(K - 1, 1)))
        r = truncate(cyclic_square(K, a), M)
        text = dumps(r)
        back = loads(text)
        assert back == r
        assert dumps(back) == text
        assert isinstance(back, LatinSquare) == (r.rows == K)

    @pytest.mark.parametrize("text", ["", "square 3 3 3\n1 2 3\n", "latin 2 3 3\n1 2 3\n"])
    def test_bad_dumps(self, text):
        with pytest.raises(InvalidArgument):
            loads(text)

    def test_rectangle_equality_and_hash(self):
        a = LatinRectangle(cells=np.array(E[:2]), parent_order=3)
        b = LatinRectangle(cells=np.array(E[:2]), parent_order=3)
        assert a == b and hash(a) == hash(b)
