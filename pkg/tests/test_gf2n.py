import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from catrot import gf2n
from catrot.errors import CapacityError, NoPolynomialFound, NotPrimitiveError
from catrot.gf2n import (BinMatrix, GFElement, builtin_poly, certify_primitive, companion_decompose,
                         companion_matrix, discrete_log, find_primitive, format_poly, frobenius_matrix,
                         gf_mul, gf_pow, matrix_order, mod_inverse, parse_poly, totient_check)

from .oracles import (bits, brute_matrix_order, brute_order_of_x, from_bits, mat_mul, mat_vec,
                      schoolbook_mulmod)

P27 = "x^27 + x^20 + x^13 + x^7 + 1"
P36 = "x^36 + x^11 + 1"


def el(value, n):
    return GFElement(value, n)


class TestMultiply:
    def test_alpha_times_alpha_squared(self, f3):
        assert gf_mul(el(0b010, 3), el(0b100, 3), f3).bits == (1, 1, 0)

    def test_identity(self, small_f):
        rng = random.Random(5)
        for _ in range(50):
            g = el(rng.randrange(1 << small_f.n), small_f.n)
            assert gf_mul(GFElement.one(small_f.n), g, small_f) == g

    def test_degree_36_reduction(self):
        f = certify_primitive(P36)
        got = gf_mul(el(1 << 25, 36), el(1 << 11, 36), f)
        assert got.value == (1 << 11) | 1

    def test_degree_mismatch(self, f3):
        with pytest.raises(ValueError, match="degree mismatch"):
            gf_mul(el(1, 3), el(1, 4), f3)

    @pytest.mark.parametrize("n", range(3, 17))
    def test_field_axioms(self, n):
        f = builtin_poly(n)
        rng = random.Random(n)
        for _ in range(1000):
            a, b, c = (el(rng.randrange(1 << n), n) for _ in range(3))
            assert gf_mul(a, b, f) == gf_mul(b, a, f)
            assert gf_mul(gf_mul(a, b, f), c, f) == gf_mul(a, gf_mul(b, c, f), f)
            assert gf_mul(a, b + c, f) == gf_mul(a, b, f) + gf_mul(a, c, f)

    @settings(max_examples=200, deadline=None)
    @given(st.integers(0, (1 << 27) - 1), st.integers(0, (1 << 27) - 1))
    def test_matches_schoolbook_n27(self, a, b):
        f = certify_primitive(P27)
        assert gf_mul(el(a, 27), el(b, 27), f).value == schoolbook_mulmod(a, b, f.mask)

    def test_degree_64(self):
        f = find_primitive(64, 5)
        rng = random.Random(64)
        for _ in range(200):
            a, b = rng.getrandbits(64), rng.getrandbits(64)
            assert gf_mul(el(a, 64), el(b, 64), f).value == schoolbook_mulmod(a, b, f.mask)


class TestPow:
    def test_alpha_to_group_order(self, f3):
        assert gf_pow(GFElement.alpha(3), 7, f3) == GFElement.one(3)

    def test_zero_exponent(self, small_f):
        assert gf_pow(el(5, small_f.n), 0, small_f) == GFElement.one(small_f.n)

    def test_matches_repeated_multiplication(self, small_f):
        n = small_f.n
        g = el(3, n)
        acc = 1
        for e in range(2 * small_f.order):
            assert gf_pow(g, e, small_f).value == acc
            acc = schoolbook_mulmod(acc, 3, small_f.mask)

    @settings(max_examples=100, deadline=None)
    @given(st.integers(0, 500), st.integers(0, 500))
    def test_exponent_split(self, e1, e2):
        f = builtin_poly(9)
        g = el(0b101101, 9)
        assert gf_pow(g, e1 + e2, f) == gf_mul(gf_pow(g, e1, f), gf_pow(g, e2, f), f)


class TestPrimitivity:
    def test_accepts_x3_x_1(self):
        assert brute_order_of_x(0b1011) == 7
        assert certify_primitive("x^3+x+1").n == 3

    def test_rejects_reducible(self):
        with pytest.raises(NotPrimitiveError) as err:
            certify_primitive("x^2 + 1")
        assert err.value.reason == "reducible"

    def test_rejects_irreducible_non_primitive(self):
        # x^4+x^3+x^2+x+1 is irreducible but x has order 5
        assert brute_order_of_x(0b11111) == 5
        with pytest.raises(NotPrimitiveError) as err:
            certify_primitive(0b11111)
        assert err.value.reason == "not primitive"

    def test_fixed_large_degree_polynomials(self):
        assert certify_primitive(P27).n == 27
        assert certify_primitive(P36).n == 36

    def test_unsupported_degree(self):
        with pytest.raises(CapacityError):
            certify_primitive((1 << 65) | 1)

    @pytest.mark.parametrize("n", range(2, 11))
    def test_agrees_with_brute_force_order(self, n):
        for low in range(1 << n):
            mask = (1 << n) | low
            primitive = brute_order_of_x(mask) == (1 << n) - 1 and mask & 1
            try:
                certify_primitive(mask)
                accepted = True
            except NotPrimitiveError:
                accepted = False
            assert accepted == bool(primitive), format_poly(mask)


class TestFindPrimitive:
    def test_degree_3(self):
        assert find_primitive(3).mask == parse_poly("x^3+x+1")

    def test_degree_36_trinomial(self):
        assert find_primitive(36, 3).mask == parse_poly(P36)

    def test_degree_8_has_no_trinomial(self):
        assert not [k for k in range(1, 8) if brute_order_of_x((1 << 8) | (1 << k) | 1) == 255]
        with pytest.raises(NoPolynomialFound):
            find_primitive(8, 3)

    def test_degree_8_pentanomial_is_smallest(self):
        f = find_primitive(8, 5)
        assert f.weight == 5
        smaller = [m for m in range(1 << 8, f.mask)
                   if m & 1 and bin(m).count("1") == 5 and brute_order_of_x(m) == 255]
        assert smaller == []

    def test_deterministic(self):
        assert find_primitive(20, 5) == find_primitive(20, 5)

    def test_bad_term_budget(self):
        with pytest.raises(ValueError):
            find_primitive(5, 4)


class TestTextForms:
    @pytest.mark.parametrize("text", [P27, P36, "x^3+x+1", " x ^ 5 +x^2+ 1 "])
    def test_round_trip(self, text):
        mask = parse_poly(text)
        assert parse_poly(format_poly(mask)) == mask
        assert parse_poly(hex(mask)) == mask

    def test_hex_form(self):
        assert parse_poly("0xB") == 0b1011
        assert format_poly(0b1011) == "x^3 + x + 1"

    @pytest.mark.parametrize("bad", ["", "x^", "y+1", "x^3+2", "0xzz"])
    def test_rejects_garbage(self, bad):
        with pytest.raises(ValueError):
            parse_poly(bad)


class TestQSet:
    def test_trinomial(self):
        assert certify_primitive(P36).q_set == (10,)

    def test_pentanomial(self):
        assert certify_primitive(P27).q_set == (6, 12, 19)

    def test_x3(self, f3):
        assert f3.q_set == (0,)


class TestMatrices:
    def test_companion_n3(self, f3):
        assert companion_matrix(f3).to_lists() == [[0, 0, 1], [1, 0, 1], [0, 1, 0]]

    def test_companion_first_column(self, small_f):
        assert companion_matrix(small_f).apply(1) == 2

    def test_companion_is_multiply_by_alpha(self, small_f):
        C = companion_matrix(small_f)
        g = 1
        for _ in range(small_f.order + 1):
            assert C.apply(g) == schoolbook_mulmod(g, 2, small_f.mask)
            g = C.apply(g)

    @pytest.mark.parametrize("n", range(3, 9))
    def test_companion_group_order(self, n):
        C = companion_matrix(builtin_poly(n))
        assert mat_mul(C.to_lists(), C.to_lists()) == (C @ C).to_lists()
        assert (C ** ((1 << n) - 1)).is_identity()

    def test_decompose_n3(self, f3):
        perm, upper = companion_decompose(f3)
        assert upper.to_lists() == [[1, 0, 1], [0, 1, 0], [0, 0, 1]]
        assert mat_mul(perm.to_lists(), upper.to_lists()) == companion_matrix(f3).to_lists()

    @pytest.mark.parametrize("n", [*range(2, 21), 27, 36, 64])
    def test_decompose_product(self, n):
        f = builtin_poly(n) if n != 64 else find_primitive(64)
        perm, upper = companion_decompose(f)
        assert perm @ upper == companion_matrix(f)
        last_col = [row[-1] for row in upper.to_lists()]
        assert tuple(j for j in range(n - 1) if last_col[j]) == f.q_set
        assert all(upper.to_lists()[i][i] == 1 for i in range(n))

    def test_frobenius_n3(self, f3):
        F = frobenius_matrix(f3)
        assert F.columns() == (0b001, 0b100, 0b110)
        assert F.apply(1) == 1

    @pytest.mark.parametrize("n", range(3, 17))
    def test_frobenius_conjugation(self, n):
        f = builtin_poly(n)
        F, C = frobenius_matrix(f), companion_matrix(f)
        assert F @ C @ F.inverse() == C @ C

    def test_frobenius_is_squaring(self, small_f):
        F = frobenius_matrix(small_f)
        for g in range(1 << small_f.n):
            assert F.apply(g) == schoolbook_mulmod(g, g, small_f.mask)

    def test_inverse(self, small_f):
        C = companion_matrix(small_f)
        assert (C @ C.inverse()).is_identity()

    def test_singular(self):
        M = BinMatrix.from_lists([[1, 1], [1, 1]])
        assert not M.is_invertible()
        with pytest.raises(ValueError):
            matrix_order(M)
        with pytest.raises(ValueError):
            M.inverse()

    def test_mat_vec_matches_dense(self, small_f):
        C = companion_matrix(small_f)
        dense = C.to_lists()
        for v in range(1 << small_f.n):
            assert C.apply(v) == from_bits(mat_vec(dense, bits(v, small_f.n)))


class TestMatrixOrder:
    def test_identity(self):
        assert matrix_order(BinMatrix.identity(5)) == 1

    def test_companion_n3(self, f3):
        assert matrix_order(companion_matrix(f3)) == 7

    @pytest.mark.parametrize("n", range(3, 9))
    def test_frobenius_order(self, n):
        F = frobenius_matrix(builtin_poly(n))
        assert brute_matrix_order(F.to_lists(), 4 * n) == n
        assert matrix_order(F) == n

    @pytest.mark.parametrize("n", [13, 20, 27, 36, 48, 64])
    def test_large_companion(self, n):
        f = builtin_poly(n) if n in (13, 20, 27, 36) else find_primitive(n)
        assert matrix_order(companion_matrix(f)) == (1 << n) - 1

    def test_non_primitive_companion(self):
        # companion of the non-primitive irreducible x^4+x^3+x^2+x+1 has order 5
        mask = 0b11111
        rows = [((mask >> i) & 1) << 3 | ((1 << (i - 1)) if i else 0) for i in range(4)]
        assert matrix_order(BinMatrix(4, tuple(rows))) == 5

    def test_cap(self):
        # a 1-cycle on 3 bits plus a 5-cycle would exceed a cap of 4
        f = builtin_poly(5)
        with pytest.raises(CapacityError):
            matrix_order(frobenius_matrix(f), cap=3)


class TestDiscreteLog:
    def test_small_values(self, f3):
        assert discrete_log(GFElement.one(3), f3) == 0
        assert discrete_log(GFElement.alpha(3), f3) == 1
        assert discrete_log(GFElement.from_bits((1, 1, 0)), f3) == 3

    def test_inverts_pow(self, small_f):
        for j in range(small_f.order):
            assert discrete_log(gf_pow(GFElement.alpha(small_f.n), j, small_f), small_f) == j

    def test_zero(self, f3):
        with pytest.raises(ValueError):
            discrete_log(GFElement(0, 3), f3)

    def test_cap(self):
        with pytest.raises(CapacityError):
            discrete_log(GFElement.one(36), certify_primitive(P36))


class TestNumberTheory:
    @pytest.mark.parametrize("a,N,inv", [(2, 7, 4), (1, 31, 1), (3, 7, 5)])
    def test_mod_inverse(self, a, N, inv):
        assert mod_inverse(a, N) == inv
        assert a * inv % N == 1

    def test_mod_inverse_not_coprime(self):
        with pytest.raises(ValueError):
            mod_inverse(3, 15)

    def test_totient_seven(self):
        ratio, bound, ok = totient_check(7)
        assert ratio == Fraction(6, 7)
        ll = math.log(math.log(7))
        assert bound == pytest.approx(1 / (math.exp(0.5772156649015329) * ll + 3 / ll), rel=1e-12)
        assert bound == pytest.approx(0.17568376, abs=1e-8)
        assert ok

    @pytest.mark.parametrize("p", [5, 13, 101, 8191, 131071])
    def test_primes(self, p):
        ratio, _, ok = totient_check(p)
        assert ratio == Fraction(p - 1, p) and ok

    def test_small_n_rejected(self):
        with pytest.raises(ValueError):
            totient_check(4)

    def test_factorize_mersenne(self):
        assert gf2n.mersenne_factors(64) == (3, 5, 17, 257, 641, 65537, 6700417)
