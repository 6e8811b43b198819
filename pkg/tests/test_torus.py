import numpy as np
import pytest

from ergodic_spectra.sampling import Sampler, integrate
from ergodic_spectra.torus import (FrequencyVector, TorusPoint, TrigPolynomial,
                                   char_eval, torus_translate, trig_algebra,
                                   trig_eval, trig_integral)


def pt(*blocks):
    return TorusPoint(np.asarray(blocks, dtype=np.float64))


def fv(*blocks):
    return FrequencyVector(np.asarray(blocks, dtype=np.int64))


class TestTorusPoint:
    def test_translate_identity(self):
        assert torus_translate(pt([0.2]), pt([0.0])) == pt([0.2])

    def test_translate_wraparound(self):
        res = torus_translate(pt([0.7]), pt([0.6]))
        assert np.allclose(res.blocks, [[0.3]])

    def test_translate_blockwise(self):
        res = torus_translate(pt([0.25, 0.5], [0.9, 0.1]), pt([0.25, 0.5], [0.2, 0.0]))
        assert np.allclose(res.blocks, [[0.5, 0.0], [0.1, 0.1]])

    def test_translate_dimension_mismatch(self):
        with pytest.raises(ValueError):
            torus_translate(pt([0.1]), pt([0.1, 0.2]))

    def test_reduction_handles_exact_one(self):
        # np.mod rounds tiny negatives up to exactly 1.0
        p = TorusPoint(np.array([[-1e-20]]))
        assert p.blocks[0, 0] == 0.0

    def test_coordinates_in_unit_interval(self):
        rng = np.random.default_rng(0)
        p = TorusPoint(rng.normal(scale=10, size=(3, 2)))
        assert np.all(p.blocks >= 0.0) and np.all(p.blocks < 1.0)


class TestCharEval:
    def test_trivial_character(self):
        assert char_eval(fv([0]), pt([0.37])) == 1.0

    def test_quarter_turn(self):
        assert char_eval(fv([1]), pt([0.25])) == pytest.approx(1j)

    def test_half_turn(self):
        assert char_eval(fv([2, -1]), pt([0.5, 0.5])) == pytest.approx(-1)

    def test_multiplicativity(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            m = FrequencyVector(rng.integers(-5, 6, size=(2, 2)))
            x = TorusPoint(rng.random((2, 2)))
            y = TorusPoint(rng.random((2, 2)))
            lhs = char_eval(m, torus_translate(x, y))
            rhs = char_eval(m, x) * char_eval(m, y)
            assert abs(lhs - rhs) <= 1e-12

    def test_unit_modulus(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            m = FrequencyVector(rng.integers(-20, 21, size=(1, 3)))
            x = TorusPoint(rng.random((1, 3)))
            assert abs(abs(char_eval(m, x)) - 1.0) <= 1e-12


def random_poly(rng, depth=1, n=1, support=5, span=4):
    terms = {}
    for _ in range(support):
        m = FrequencyVector(rng.integers(-span, span + 1, size=(depth, n)))
        terms[m] = complex(rng.normal(), rng.normal())
    return TrigPolynomial(depth, n, terms)


class TestAlgebra:
    def test_additive_identity(self):
        rng = np.random.default_rng(3)
        P = random_poly(rng)
        Q = trig_algebra(P, TrigPolynomial.zero(1, 1), "add")
        assert dict(Q.terms()) == dict(P.terms())

    def test_character_multiplicativity(self):
        P = TrigPolynomial.character(fv([1, 0]), 2.0)
        Q = TrigPolynomial.character(fv([2, -1]), 0.5 + 1j)
        R = trig_algebra(P, Q, "mul")
        assert R.support_size == 1
        assert R.coefficient(fv([3, -1])) == pytest.approx(1.0 + 2j)

    def test_conjugate_fixes_real_polynomials(self):
        P = TrigPolynomial.cosine(1, 1, 1, 1, 0.1)
        assert dict(trig_algebra(P, None, "conj").terms()) == dict(P.terms())

    def test_depth_mismatch(self):
        with pytest.raises(ValueError):
            TrigPolynomial.zero(1, 1) * TrigPolynomial.zero(2, 1)

    def test_pruning_keeps_support_finite(self):
        P = TrigPolynomial.character(fv([1]), 1.0)
        diff = P - P
        assert diff.support_size == 0

    def test_product_evaluates_pointwise(self):
        rng = np.random.default_rng(4)
        P = random_poly(rng, depth=2, n=2)
        Q = random_poly(rng, depth=2, n=2)
        R = P * Q
        for _ in range(100):
            x = TorusPoint(rng.random((2, 2)))
            lhs = trig_eval(R, x)
            rhs = trig_eval(P, x) * trig_eval(Q, x)
            assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(rhs))


class TestEvalIntegral:
    def test_constant(self):
        P = TrigPolynomial.constant(1, 1, 3.5 - 1j)
        assert trig_eval(P, pt([0.77])) == pytest.approx(3.5 - 1j)
        assert trig_integral(P) == pytest.approx(3.5 - 1j)

    def test_cosine_values(self):
        P = TrigPolynomial.cosine(1, 1, 1, 1)
        assert trig_eval(P, pt([0.0])) == pytest.approx(1.0)
        assert abs(trig_eval(P, pt([0.25]))) <= 1e-12

    def test_character_integrates_to_zero(self):
        assert trig_integral(TrigPolynomial.character(fv([3]))) == 0.0

    def test_zero_frequency_extraction(self):
        P = TrigPolynomial.constant(1, 1, 3.0) + TrigPolynomial.cosine(1, 1, 1, 1)
        assert trig_integral(P) == pytest.approx(3.0)

    def test_real_flag_means_real_values(self):
        rng = np.random.default_rng(5)
        P = random_poly(rng, depth=2, n=1)
        P = P + P.conjugate()  # Hermitian symmetrization
        assert P.is_real()
        for _ in range(100):
            x = TorusPoint(rng.random((2, 1)))
            assert abs(trig_eval(P, x).imag) <= 1e-12

    def test_integral_matches_quadrature(self):
        rng = np.random.default_rng(6)
        for seed in range(5):
            P = random_poly(rng, depth=2, n=1, support=20)
            sampler = Sampler(kind="rank1_lattice", seed=seed, count=2 ** 13,
                              dims=(2, 1))
            mean, stderr = integrate(
                lambda pts: np.array([trig_eval(P, TorusPoint(p)) for p in pts]),
                sampler)
            assert abs(mean - trig_integral(P)) <= 3 * stderr + 1e-9


class TestSerialization:
    def test_round_trip(self):
        rng = np.random.default_rng(7)
        P = random_poly(rng, depth=3, n=2, support=8)
        Q = TrigPolynomial.from_records(3, 2, P.to_records())
        assert dict(Q.terms()) == pytest.approx(dict(P.terms()))
