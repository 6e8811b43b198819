import numpy as np
import pytest

from ergodic_spectra import presets
from ergodic_spectra.commutator import (CommutatorField, adaptive_mourre_N,
                                        default_sample_points, dini_profile,
                                        g_birkhoff_checkpoints, g_birkhoff_eval,
                                        g_function, mourre_bound,
                                        verify_commutator, xi_chi)
from ergodic_spectra.dynamics import SystemConfig
from ergodic_spectra.flow import FlowDirection, flow_apply
from ergodic_spectra.torus import TorusPoint, TrigPolynomial, char_eval, FrequencyVector

SQRT2 = np.sqrt(2.0)
SQRT3 = np.sqrt(3.0)
TWO_PI = 2.0 * np.pi


def pt(*blocks):
    return TorusPoint(np.asarray(blocks, dtype=np.float64))


def fd_xi_oracle(cfg, j, chi, x, ts=(1e-3, 1e-4, 1e-5)):
    """Independent oracle: log-derivative of (chi o xi) along the flow."""
    M = cfg.xi_mats(j)[j - 2]
    chi_arr = np.asarray(chi, dtype=np.int64)

    def char_of_xi(point):
        image = (M @ point.blocks[j - 2]) % 1.0
        return char_eval(FrequencyVector(chi_arr[None, :]),
                         TorusPoint(image[None, :]))

    base = char_of_xi(x)
    vals = [(char_of_xi(flow_apply(x, t, cfg.flow, j - 1)) - base) / (t * base)
            for t in ts]
    ts = list(ts)
    for level in range(1, len(ts)):
        for i in range(len(ts) - level):
            t0, t1 = ts[i], ts[i + level]
            vals[i] = (t0 * vals[i + 1] - t1 * vals[i]) / (t0 - t1)
    return vals[0]


class TestXiChi:
    def test_anzai_value(self):
        cfg = presets.anzai_config()
        assert xi_chi(cfg, 2, [1]) == pytest.approx(1j * TWO_PI * SQRT2)

    def test_diagonal_two_torus(self):
        cfg = SystemConfig(
            n=2, d=2, alpha=[SQRT2 % 1, SQRT3 % 1],
            xi=((np.diag([2, 3]).astype(np.int64),),),
            eta=((TrigPolynomial.zero(1, 2), TrigPolynomial.zero(1, 2)),),
            flow=FlowDirection(np.array([SQRT2, SQRT3])))
        expected = 1j * TWO_PI * (2 * SQRT2 + 3 * SQRT3)
        assert xi_chi(cfg, 2, [1, 1]) == pytest.approx(expected)
        assert abs(xi_chi(cfg, 2, [1, 1])) == pytest.approx(50.419920, abs=1e-4)

    def test_matches_finite_difference_oracle(self):
        cfg = presets.anzai_config()
        oracle = fd_xi_oracle(cfg, 2, [1], pt([0.3], [0.1]))
        assert oracle == pytest.approx(xi_chi(cfg, 2, [1]), abs=1e-7)

    def test_trivial_character_rejected(self):
        with pytest.raises(ValueError):
            xi_chi(presets.anzai_config(), 2, [0])

    def test_degenerate_pairing_rejected(self):
        cfg = SystemConfig(
            n=2, d=2, alpha=[SQRT2 % 1, SQRT3 % 1],
            xi=((np.eye(2, dtype=np.int64),),),
            eta=((TrigPolynomial.zero(1, 2), TrigPolynomial.zero(1, 2)),),
            flow=FlowDirection(np.array([0.5, 0.5])))
        with pytest.raises(ArithmeticError):
            xi_chi(cfg, 2, [1, -1])


class TestGFunction:
    def test_affine_field_is_constant(self):
        field = g_function(presets.anzai_config(), 2, [1])
        assert field.constant == pytest.approx(-TWO_PI * SQRT2)
        assert field.oscillation.support_size == 0
        assert field.eval(pt([0.123], [0.9])) == pytest.approx(-TWO_PI * SQRT2)

    def test_perturbed_anzai_values(self):
        # g(x) = -2*pi*sqrt(2) + 0.4*pi^2*sqrt(2)*sin(2*pi*x)
        field = g_function(presets.anzai_config(perturbed=True), 2, [1])
        amp = 0.4 * np.pi ** 2 * SQRT2
        assert field.eval(pt([0.25], [0.0])) == pytest.approx(-TWO_PI * SQRT2 + amp)
        assert field.eval(pt([0.25], [0.0])) == pytest.approx(-3.3026746799869766)
        assert field.eval(pt([0.0], [0.0])) == pytest.approx(-TWO_PI * SQRT2)
        assert field.eval(pt([0.75], [0.5])) == pytest.approx(-TWO_PI * SQRT2 - amp)

    def test_oscillation_is_real_and_mean_zero(self):
        field = g_function(presets.depth3_config(), 3, [1])
        assert field.oscillation.is_real()
        assert field.oscillation.integral() == 0.0

    def test_character_negation_flips_sign(self):
        cfg = presets.anzai_config(perturbed=True)
        plus = g_function(cfg, 2, [1])
        minus = g_function(cfg, 2, [-1])
        for x in (pt([0.1], [0.0]), pt([0.6], [0.0])):
            assert minus.eval(x) == pytest.approx(-plus.eval(x))

    def test_eval_batch_matches_eval(self):
        cfg = presets.depth3_config()
        field = g_function(cfg, 3, [1])
        rng = np.random.default_rng(30)
        batch = rng.random((40, 3, 1))
        vals = field.eval_batch(batch)
        for i in range(batch.shape[0]):
            assert vals[i] == pytest.approx(field.eval(TorusPoint(batch[i])),
                                            abs=1e-12)


class TestBirkhoff:
    def test_single_step_equals_pointwise_field(self):
        cfg = presets.anzai_config(perturbed=True)
        field = g_function(cfg, 2, [1])
        x = pt([0.37], [0.0])
        assert g_birkhoff_eval(cfg, 2, [1], 1, x) == pytest.approx(field.eval(x))

    def test_affine_average_is_constant_at_any_n(self):
        cfg = presets.anzai_config()
        for N in (1, 10, 1000):
            val = g_birkhoff_eval(cfg, 2, [1], N, pt([0.4], [0.2]))
            assert val == pytest.approx(-TWO_PI * SQRT2, abs=1e-12)

    def test_matches_geometric_sum_oracle(self):
        # oscillation averages along the rotation orbit have a closed form
        cfg = presets.anzai_config(perturbed=True)
        alpha = cfg.alpha[0]
        amp = 0.4 * np.pi ** 2 * SQRT2
        for x0, N in ((0.123, 57), (0.84, 1000)):
            kernel = (np.exp(2j * np.pi * N * alpha) - 1.0) / (
                N * (np.exp(2j * np.pi * alpha) - 1.0))
            expected = -TWO_PI * SQRT2 + amp * (
                np.exp(2j * np.pi * x0) * kernel).imag
            got = g_birkhoff_eval(cfg, 2, [1], N, pt([x0], [0.0]))
            assert got == pytest.approx(expected, abs=1e-10)

    def test_deviation_shrinks_with_n(self):
        cfg = presets.anzai_config(perturbed=True)
        pts = default_sample_points(cfg, 2, lattice_per_factor=512, orbit_length=16)
        rows = g_birkhoff_checkpoints(cfg, 2, [1], [100, 1000, 10000], pts)
        devs = np.max(np.abs(rows - (-TWO_PI * SQRT2)), axis=1)
        assert devs[0] >= devs[1] >= devs[2]
        assert devs[2] <= 0.5 * TWO_PI * SQRT2

    def test_checkpoint_validation(self):
        cfg = presets.anzai_config()
        pts = np.zeros((1, 2, 1))
        with pytest.raises(ValueError):
            g_birkhoff_checkpoints(cfg, 2, [1], [10, 5], pts)
        with pytest.raises(ValueError):
            g_birkhoff_checkpoints(cfg, 2, [1], [0], pts)


class TestMourre:
    def test_affine_bound_is_the_constant(self):
        bound = mourre_bound(presets.anzai_config(), 2, [1], N=1)
        assert bound.a == pytest.approx(TWO_PI * SQRT2)
        assert bound.a == pytest.approx(8.8857659, abs=1e-6)

    def test_perturbed_pointwise_bound(self):
        bound = mourre_bound(presets.anzai_config(perturbed=True), 2, [1], N=1)
        expected = TWO_PI * SQRT2 - 0.4 * np.pi ** 2 * SQRT2
        assert bound.a == pytest.approx(expected, abs=1e-4)
        # the witness sits near the crest of the oscillation
        assert bound.witness.blocks[0, 0] == pytest.approx(0.25, abs=1e-2)

    def test_averaging_restores_the_constant(self):
        cfg = presets.anzai_config(perturbed=True)
        samples = default_sample_points(cfg, 2, lattice_per_factor=512,
                                        orbit_length=16)
        bound = mourre_bound(cfg, 2, [1], N=10 ** 4, samples=samples)
        assert bound.a >= 0.9 * TWO_PI * SQRT2

    def test_adaptive_n_for_perturbed_anzai(self):
        cfg = presets.anzai_config(perturbed=True)
        samples = default_sample_points(cfg, 2, lattice_per_factor=512,
                                        orbit_length=16)
        assert adaptive_mourre_N(cfg, 2, [1], samples=samples, max_power=2) == 10

    def test_adaptive_n_for_affine_anzai(self):
        cfg = presets.anzai_config()
        samples = default_sample_points(cfg, 2, lattice_per_factor=512,
                                        orbit_length=16)
        assert adaptive_mourre_N(cfg, 2, [1], samples=samples, max_power=1) == 1


class TestVerifyCommutator:
    def test_affine_residual_magnitude(self):
        # |residual(t)| ~ |xi|^2 * t / 2 for the purely affine system
        check = verify_commutator(presets.anzai_config(), 2, [1],
                                  t_schedule=(1e-2, 1e-3, 1e-4, 1e-5))
        xi_sq = (TWO_PI * SQRT2) ** 2
        assert check.residuals[1] == pytest.approx(xi_sq * 1e-3 / 2, rel=1e-2)
        assert check.residuals[1] == pytest.approx(0.0395, abs=2e-4)

    def test_first_order_decay(self):
        for cfg in (presets.anzai_config(perturbed=True), presets.depth3_config()):
            check = verify_commutator(cfg, 2, [1])
            ratios = [b / a for a, b in zip(check.residuals, check.residuals[1:])]
            assert all(0.05 <= r <= 0.2 for r in ratios)

    def test_extrapolated_residual_vanishes(self):
        for cfg, j in ((presets.anzai_config(perturbed=True), 2),
                       (presets.depth3_config(), 3)):
            check = verify_commutator(cfg, j, [1])
            assert check.extrapolated <= 1e-8

    def test_zero_weight_kills_residuals(self):
        cfg = presets.anzai_config(perturbed=True)
        check = verify_commutator(cfg, 2, [1], f=TrigPolynomial.zero(2, 1))
        assert check.residuals == (0.0,) * len(check.t_schedule)
        assert check.extrapolated == 0.0

    def test_schedule_validation(self):
        cfg = presets.anzai_config()
        with pytest.raises(ValueError):
            verify_commutator(cfg, 2, [1], t_schedule=(1e-4, 1e-3))
        with pytest.raises(ValueError):
            verify_commutator(cfg, 2, [1], t_schedule=(0.5, 0.1))


class TestDini:
    def test_modulus_oracle_for_perturbed_anzai(self):
        # H eta = -0.2*pi*sqrt(2)*i*sin(2*pi*x), so the shifted difference has
        # sup norm 0.4*pi*sqrt(2)*|sin(pi*sqrt(2)*t)| exactly
        cfg = presets.anzai_config(perturbed=True)
        prof = dini_profile(cfg, 2, 1, t_grid=np.geomspace(1e-3, 1.0, 13))
        for t, mod in zip(prof.t_grid, prof.moduli):
            expected = 0.4 * np.pi * SQRT2 * abs(np.sin(np.pi * SQRT2 * t))
            assert mod == pytest.approx(expected, rel=1e-4)

    def test_lipschitz_bound_dominates(self):
        for cfg, j in ((presets.anzai_config(perturbed=True), 2),
                       (presets.depth3_config(), 2),
                       (presets.depth3_config(), 3)):
            for k in range(1, cfg.n + 1):
                prof = dini_profile(cfg, j, k, t_grid=np.geomspace(1e-4, 1.0, 17))
                for t, mod in zip(prof.t_grid, prof.moduli):
                    assert mod <= prof.lipschitz * t * (1 + 1e-9)
                assert prof.integral <= prof.lipschitz * (1 + 1e-9)

    def test_anzai_lipschitz_value(self):
        # L = sum |c| * 2*pi*|<m, v>| = 2 * (0.05 * 2*pi*sqrt(2)) * 2*pi*sqrt(2)
        prof = dini_profile(presets.anzai_config(perturbed=True), 2, 1,
                            t_grid=[0.1, 1.0])
        assert prof.lipschitz == pytest.approx(0.8 * np.pi ** 2)

    def test_affine_system_has_zero_profile(self):
        prof = dini_profile(presets.anzai_config(), 2, 1, t_grid=[0.01, 0.1, 1.0])
        assert prof.moduli == (0.0, 0.0, 0.0)
        assert prof.integral == 0.0
        assert prof.lipschitz == 0.0

    def test_grid_validation(self):
        cfg = presets.anzai_config(perturbed=True)
        with pytest.raises(ValueError):
            dini_profile(cfg, 2, 1, t_grid=[0.0, 0.1])
        with pytest.raises(ValueError):
            dini_profile(cfg, 2, 2, t_grid=[0.1])
