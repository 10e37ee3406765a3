import numpy as np
import pytest

from renyidpi import (
    DensityMatrix,
    InvalidAlpha,
    InvalidOrder,
    OptimizerConfig,
    RenyiOrder,
    araki_masuda_norm,
    closed_form_optimizer,
    dpi_gap,
    frobenius,
    herm_part,
    identity_channel,
    integral_power_quadrature,
    integral_representation_check,
    matrix_power_psd,
    partial_trace_channel,
    petz_renyi,
    quadratic_form,
    random_channel,
    random_density,
    random_unitary,
    relative_entropy,
    relative_entropy_modular,
    sandwiched_renyi,
    stream,
    trace_distance,
    variational_value,
    build_recoverable_triple,
)
from helpers import classical_kl, classical_renyi, diag_density, rand_probs

HALF_HALF = diag_density([0.5, 0.5])
QUARTER = diag_density([0.25, 0.75])


class TestRenyiOrder:
    def test_derived_orders(self):
        order = RenyiOrder(0.5)
        assert order.p == pytest.approx(4.0)
        assert order.n == pytest.approx(2.0)

    @pytest.mark.parametrize("alpha", [0.0, 1.0, -1.5, 2.0])
    def test_rejects_out_of_range(self, alpha):
        with pytest.raises(InvalidAlpha):
            RenyiOrder(alpha)

    def test_endpoint_allowed(self):
        assert RenyiOrder(-1.0).alpha == -1.0


class TestSandwiched:
    def test_equal_states(self):
        rho = random_density(3, 0)
        assert sandwiched_renyi(rho, rho, 0.5) == 0.0

    def test_known_two_point_value(self):
        # alpha = 1/2 means order n = 2: log sum p^2/q = log(4/3).
        val = sandwiched_renyi(HALF_HALF, QUARTER, 0.5)
        assert val == pytest.approx(np.log(4.0 / 3.0), abs=1e-12)

    def test_alpha_minus_one_is_order_half(self):
        rng = np.random.default_rng(1)
        p, q = rand_probs(rng, 3), rand_probs(rng, 3)
        val = sandwiched_renyi(diag_density(p), diag_density(q), -1.0)
        expect = -2.0 * np.log(np.sum(np.sqrt(p * q)))
        assert val == pytest.approx(expect, abs=1e-12)

    def test_classical_reduction(self):
        rng = np.random.default_rng(2)
        for trial in range(50):
            p, q = rand_probs(rng, 4), rand_probs(rng, 4)
            alpha = rng.choice([-0.9, -0.5, -0.2, 0.2, 0.5, 0.9])
            got = sandwiched_renyi(diag_density(p), diag_density(q), alpha)
            assert abs(got - classical_renyi(p, q, 1.0 / (1.0 - alpha))) <= 1e-10


class TestPetz:
    def test_equal_states(self):
        rho = random_density(3, 3)
        assert petz_renyi(rho, rho, -0.4) == 0.0

    def test_diagonal_half(self):
        rng = np.random.default_rng(4)
        p, q = rand_probs(rng, 3), rand_probs(rng, 3)
        val = petz_renyi(diag_density(p), diag_density(q), 0.5)
        expect = 2.0 * np.log(np.sum(p**1.5 * q**-0.5))
        assert val == pytest.approx(expect, abs=1e-12)

    def test_classical_reduction(self):
        rng = np.random.default_rng(5)
        for trial in range(50):
            p, q = rand_probs(rng, 3), rand_probs(rng, 3)
            alpha = rng.choice([-0.8, -0.3, 0.3, 0.8])
            got = petz_renyi(diag_density(p), diag_density(q), alpha)
            assert abs(got - classical_renyi(p, q, 1.0 + alpha)) <= 1e-10

    def test_dominated_by_sandwiched(self):
        # The Petz value is the omega = rho point of the variational
        # problem whose optimum defines the sandwiched divergence, so at
        # equal parameter the sandwiched value dominates; inequality only.
        for seed in range(20):
            rho = random_density(3, stream(6, seed))
            sigma = random_density(3, stream(7, seed))
            for alpha in (-0.8, -0.4, 0.2, 0.5, 0.8):
                assert petz_renyi(rho, sigma, alpha) <= sandwiched_renyi(rho, sigma, alpha) + 1e-12


class TestRelativeEntropy:
    def test_known_value(self):
        val = relative_entropy(HALF_HALF, QUARTER)
        assert val == pytest.approx(0.5 * np.log(4.0 / 3.0), abs=1e-12)
        rng = np.random.default_rng(8)
        p, q = rand_probs(rng, 4), rand_probs(rng, 4)
        assert relative_entropy(diag_density(p), diag_density(q)) == pytest.approx(
            classical_kl(p, q), abs=1e-12
        )

    def test_nonnegative(self):
        for seed in range(10):
            rho = random_density(3, stream(9, seed))
            sigma = random_density(3, stream(10, seed))
            assert relative_entropy(rho, sigma) >= 0.0

    def test_modular_route_agrees(self):
        for seed in range(10):
            rho = random_density(3, stream(11, seed))
            sigma = random_density(3, stream(12, seed))
            direct = relative_entropy(rho, sigma)
            assert abs(direct - relative_entropy_modular(rho, sigma)) <= 1e-10


class TestArakiMasuda:
    def test_equal_states_unit_norm(self):
        rho = random_density(3, 13)
        for p in (1.5, 3.0, 7.0):
            assert araki_masuda_norm(rho, rho, p) == pytest.approx(1.0, abs=1e-12)

    def test_identity_reference(self):
        # sigma = I/d pulls out as a scalar.
        rho = random_density(3, 14)
        d = 3.0
        for p in (1.5, 4.0):
            expect = d ** ((1.0 - 2.0 / p) / 2.0) * float(
                np.sum(rho.spectral.eigenvalues ** (p / 2.0)) ** (1.0 / p)
            )
            got = araki_masuda_norm(rho, DensityMatrix(np.eye(3) / 3), p)
            assert got == pytest.approx(expect, abs=1e-12)

    def test_diagonal_formula(self):
        rng = np.random.default_rng(15)
        p_vec, q_vec = rand_probs(rng, 3), rand_probs(rng, 3)
        p = 3.0
        expect = float(np.sum((p_vec * q_vec ** (2.0 / p - 1.0)) ** (p / 2.0)) ** (1.0 / p))
        got = araki_masuda_norm(diag_density(p_vec), diag_density(q_vec), p)
        assert got == pytest.approx(expect, abs=1e-12)

    def test_consistent_with_sandwiched(self):
        for seed in range(10):
            rho = random_density(3, stream(16, seed))
            sigma = random_density(3, stream(17, seed))
            for alpha in (-0.7, -0.3, 0.3, 0.7):
                via_norm = (2.0 / alpha) * np.log(
                    araki_masuda_norm(rho, sigma, 2.0 / (1.0 - alpha))
                )
                assert abs(via_norm - sandwiched_renyi(rho, sigma, alpha)) <= 1e-10

    def test_rejects_bad_orders(self):
        rho = random_density(2, 18)
        with pytest.raises(InvalidOrder):
            araki_masuda_norm(rho, rho, 2.0)
        with pytest.raises(InvalidOrder):
            araki_masuda_norm(rho, rho, 0.5)


class TestClosedFormOptimizer:
    def test_equal_states_fixed_point(self):
        rho = random_density(3, 19)
        res = closed_form_optimizer(rho, rho, 0.4)
        assert frobenius(res.omega_star.matrix - rho.matrix) <= 1e-10

    def test_diagonal_formula(self):
        rng = np.random.default_rng(20)
        p, q = rand_probs(rng, 3), rand_probs(rng, 3)
        alpha = 0.35
        raw = (p * q**-alpha) ** (1.0 / (1.0 - alpha))
        expect = raw / raw.sum()
        res = closed_form_optimizer(diag_density(p), diag_density(q), alpha)
        np.testing.assert_allclose(np.diag(res.omega_star.matrix).real, expect, atol=1e-12)

    def test_attained_value_matches_divergence(self):
        for seed in range(10):
            rho = random_density(3, stream(21, seed))
            sigma = random_density(3, stream(22, seed))
            for alpha in (-0.6, -0.3, 0.3, 0.6):
                res = closed_form_optimizer(rho, sigma, alpha)
                expect = np.exp(alpha * sandwiched_renyi(rho, sigma, alpha))
                assert abs(res.value - expect) <= 1e-9

    def test_omega_star_formula(self):
        rho = random_density(2, 23)
        sigma = random_density(2, 24)
        order = RenyiOrder(0.5)
        res = closed_form_optimizer(rho, sigma, order)
        rebuilt = matrix_power_psd(res.y, order.p / 2.0) / res.normalizer
        assert frobenius(res.omega_star.matrix - rebuilt) <= 1e-10


def golden_section(fn, lo, hi, iters=200):
    phi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c, d = b - phi * (b - a), a + phi * (b - a)
    fc, fd = fn(c), fn(d)
    for _ in range(iters):
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - phi * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + phi * (b - a)
            fd = fn(d)
    return 0.5 * (a + b)


class TestVariational:
    def test_equal_states(self):
        rho = random_density(2, 25)
        value, omega = variational_value(rho, rho, 0.4, OptimizerConfig(restarts=2, seed=0))
        assert value == pytest.approx(1.0, abs=1e-8)
        assert trace_distance(omega.matrix, rho.matrix) <= 1e-4

    def test_diagonal_against_scalar_oracle(self):
        # Independent route: golden-section search over the 2-simplex.
        rng = np.random.default_rng(26)
        p, q = rand_probs(rng, 2), rand_probs(rng, 2)
        rho, sigma = diag_density(p), diag_density(q)
        for alpha in (0.5, -0.5):
            sign = 1.0 if alpha > 0 else -1.0

            def scalar_form(w):
                omega = np.array([w, 1.0 - w])
                return sign * float(np.sum(p * q**-alpha * omega**alpha))

            w_star = golden_section(scalar_form, 1e-6, 1.0 - 1e-6)
            oracle = sign * scalar_form(w_star)
            value, _ = variational_value(rho, sigma, alpha, OptimizerConfig(restarts=3, seed=1))
            closed = closed_form_optimizer(rho, sigma, alpha).value
            assert abs(value - oracle) <= 1e-6
            assert abs(value - closed) <= 1e-6

    def test_matches_closed_form_and_unique(self):
        cfg = OptimizerConfig(restarts=4, seed=2)
        for seed in range(5):
            rho = random_density(2, stream(27, seed))
            sigma = random_density(2, stream(28, seed))
            for alpha in (0.3, -0.6):
                closed = closed_form_optimizer(rho, sigma, alpha)
                value, omega = variational_value(rho, sigma, alpha, cfg)
                assert abs(value - closed.value) <= 1e-6
                assert trace_distance(omega.matrix, closed.omega_star.matrix) <= 1e-4

    def test_random_probes_never_beat_optimum(self):
        rho = random_density(3, 29)
        sigma = random_density(3, 30)
        rng = stream(31)
        for alpha in (0.5, -0.5):
            best = closed_form_optimizer(rho, sigma, alpha).value
            for _ in range(100):
                omega = random_density(3, rng)
                probe = quadratic_form(rho, sigma, omega, alpha)
                if alpha > 0:
                    assert probe <= best + 1e-9
                else:
                    assert probe >= best - 1e-9

    def test_rejects_tiny_alpha(self):
        rho = random_density(2, 32)
        with pytest.raises(InvalidAlpha):
            variational_value(rho, rho, 1e-4)


class TestDpiGap:
    def test_identity_channel_zero(self):
        rho = random_density(3, 33)
        sigma = random_density(3, 34)
        assert dpi_gap(rho, sigma, identity_channel(3), 0.5) == 0.0

    def test_recoverable_product(self):
        rho_ab, sigma_ab = build_recoverable_triple("product", (2, 2), 35)
        ch = partial_trace_channel(2, 2)
        for alpha in (-0.9, -0.3, 0.3, 0.9):
            assert abs(dpi_gap(rho_ab, sigma_ab, ch, alpha)) <= 1e-9

    def test_nonnegative_on_random_triples(self):
        for seed in range(20):
            rho = random_density(4, stream(36, seed))
            sigma = random_density(4, stream(37, seed))
            ch = partial_trace_channel(2, 2) if seed % 2 == 0 else random_channel(4, 2, rng_seed=stream(38, seed))
            for alpha in (-0.7, -0.2, 0.2, 0.7):
                assert dpi_gap(rho, sigma, ch, alpha) >= -1e-9


class TestLimitConsistency:
    def test_richardson_bound(self):
        h = 1e-4
        big = 1e-2
        for seed in range(5):
            rho = random_density(3, stream(39, seed))
            sigma = random_density(3, stream(40, seed))
            d0 = relative_entropy(rho, sigma)

            def slope(hh):
                return (sandwiched_renyi(rho, sigma, hh) - d0) / hh

            # Two-step Richardson estimate of the alpha-slope at zero.
            c_plus = 2.0 * slope(big) - slope(2.0 * big)
            c_minus = 2.0 * slope(-big) - slope(-2.0 * big)
            c = 2.0 * max(abs(c_plus), abs(c_minus)) + 0.1
            assert abs(sandwiched_renyi(rho, sigma, h) - d0) <= c * h
            assert abs(sandwiched_renyi(rho, sigma, -h) - d0) <= c * h


def lifted_sandwiched(rho, sigma, v, alpha):
    """Sandwiched divergence of the singular lifted pair V rho V*, V sigma V*,
    evaluated through pseudo-powers on the common support."""
    big_rho = v @ rho.matrix @ v.conj().T
    big_sigma = v @ sigma.matrix @ v.conj().T
    w_s, u_s = np.linalg.eigh(herm_part(big_sigma))
    keep = w_s > 1e-12
    sig_pow = (u_s[:, keep] * w_s[keep] ** -alpha) @ u_s[:, keep].conj().T
    w_r, u_r = np.linalg.eigh(herm_part(big_rho))
    keep_r = w_r > 1e-12
    rho_half = (u_r[:, keep_r] * np.sqrt(w_r[keep_r])) @ u_r[:, keep_r].conj().T
    y = herm_part(rho_half @ sig_pow @ rho_half)
    evals = np.linalg.eigvalsh(y)
    evals = evals[evals > 1e-12]
    return (1.0 - alpha) / alpha * np.log(np.sum(evals ** (1.0 / (1.0 - alpha))))


class TestIsometryInvariance:
    def test_unitary_conjugation(self):
        rho = random_density(3, 41)
        sigma = random_density(3, 42)
        u = random_unitary(3, 43)
        rho_u = DensityMatrix(u @ rho.matrix @ u.conj().T)
        sigma_u = DensityMatrix(u @ sigma.matrix @ u.conj().T)
        for alpha in (-0.8, -0.3, 0.3, 0.8):
            assert abs(
                sandwiched_renyi(rho_u, sigma_u, alpha) - sandwiched_renyi(rho, sigma, alpha)
            ) <= 1e-9

    def test_proper_isometry_lift(self):
        from renyidpi import random_isometry

        rho = random_density(2, 44)
        sigma = random_density(2, 45)
        v = random_isometry(6, 2, 46)
        for alpha in (-0.5, 0.5):
            lifted = lifted_sandwiched(rho, sigma, v, alpha)
            assert abs(lifted - sandwiched_renyi(rho, sigma, alpha)) <= 1e-9


class TestIntegralRepresentation:
    def test_scalar_one(self):
        out = integral_power_quadrature(np.array([[1.0 + 0j]]), 0.5)
        assert abs(out[0, 0] - 1.0) <= 1e-6

    def test_scalar_sqrt_two(self):
        out = integral_power_quadrature(np.array([[2.0 + 0j]]), 0.5)
        assert abs(out[0, 0] - np.sqrt(2.0)) <= 1e-6

    def test_diagonal_inverse_sqrt(self):
        m = np.diag([1.0, 2.0, 5.0]).astype(complex)
        out = integral_power_quadrature(m, -0.5)
        np.testing.assert_allclose(
            np.diag(out).real, [1.0, 2.0**-0.5, 5.0**-0.5], atol=1e-6
        )

    @pytest.mark.parametrize("alpha", [0.25, -0.25, 0.75, -0.75])
    def test_random_psd(self, alpha):
        for seed in range(5):
            m = random_density(3, stream(47, seed)).matrix * 3.0
            assert integral_representation_check(m, alpha) <= 1e-6

    def test_rejects_endpoint_alpha(self):
        with pytest.raises(InvalidAlpha):
            integral_power_quadrature(np.eye(2), -1.0)
