"""Effective capacity, power policies, and limiting rates."""

import math

import numpy as np
import pytest
from scipy.optimize import brentq
from scipy.special import exp1

from qos_energy import (
    BoundedTable,
    Deterministic,
    DivergentInverseMoment,
    NakagamiM,
    PowerPolicy,
    QosConfig,
    Rayleigh,
    ThetaZero,
    bit_energy,
    bit_energy_db,
    delay_limited_limit,
    power_policy_value,
    service_rate_csir,
    service_rate_csit,
    shannon_limit,
    solve_alpha,
    spectral_efficiency_csir,
    spectral_efficiency_csit,
)
from qos_energy.effcap import LN2, _mean_policy_power, to_db

RAY = Rayleigh()
NAK2 = NakagamiM(m=2.0, mean=1.0)
TAB = BoundedTable(((0.25, 0.2), (1.0, 0.5), (4.0, 0.3)))
QOS = QosConfig(theta=0.05, T=2e-3, B=1e5)


class TestQosConfig:
    def test_beta_and_zeta(self):
        q = QosConfig(theta=0.01, T=2e-3, B=1e5)
        assert q.beta == pytest.approx(0.01 * 2e-3 * 1e5 / LN2, rel=1e-15)
        assert q.zeta == 1e-5

    def test_validation(self):
        with pytest.raises(ValueError):
            QosConfig(theta=-0.1, T=2e-3, B=1e5)
        with pytest.raises(ValueError):
            QosConfig(theta=0.1, T=0.0, B=1e5)
        with pytest.raises(ValueError):
            QosConfig(theta=0.1, T=2e-3, B=-1.0)
        with pytest.raises(ValueError):
            QosConfig(theta=math.inf, T=2e-3, B=1e5)


class TestPowerPolicy:
    def test_ln_alpha_derived(self):
        pol = PowerPolicy(alpha=0.5, beta=3.0)
        assert pol.ln_alpha == pytest.approx(math.log(0.5), rel=1e-15)

    def test_explicit_ln_alpha_allows_underflowed_alpha(self):
        pol = PowerPolicy(alpha=0.0, beta=3.0, ln_alpha=-2000.0)
        assert pol.ln_alpha == -2000.0

    def test_validation(self):
        with pytest.raises(ValueError):
            PowerPolicy(alpha=0.0, beta=1.0)
        with pytest.raises(ValueError):
            PowerPolicy(alpha=1.0, beta=-0.5)

    def test_policy_value_threshold(self):
        pol = PowerPolicy(alpha=1.0, beta=0.0)
        assert power_policy_value(pol, 0.5) == 0.0
        # beta = 0 reduces to water-filling 1/alpha - 1/z
        assert power_policy_value(pol, 2.0) == pytest.approx(0.5, rel=1e-12)
        vec = power_policy_value(pol, np.array([0.5, 1.0, 2.0, 4.0]))
        assert vec == pytest.approx([0.0, 0.0, 0.5, 0.75], rel=1e-12)

    def test_rate_power_identity(self):
        # 1 + mu(z) z = (z/alpha)^(1/(beta+1)) on the active set
        pol = PowerPolicy(alpha=0.3, beta=4.0)
        for z in (0.5, 1.0, 3.7):
            mu = power_policy_value(pol, z)
            assert 1 + mu * z == pytest.approx(
                (z / 0.3) ** (1 / 5.0), rel=1e-12
            )


class TestSolveAlpha:
    @pytest.mark.parametrize("model", [RAY, NAK2, TAB], ids=["ray", "nak2", "tab"])
    @pytest.mark.parametrize("snr", [0.01, 1.0, 10.0])
    @pytest.mark.parametrize("theta", [0.001, 0.05, 1.0])
    def test_power_constraint_met(self, model, snr, theta):
        qos = QosConfig(theta=theta, T=2e-3, B=1e5)
        pol = solve_alpha(snr, qos, model)
        spent = _mean_policy_power(model, pol.ln_alpha, pol.beta)
        assert spent == pytest.approx(snr, rel=1e-8)

    def test_deterministic_closed_form(self):
        # single gain z0: mu = snr exactly, so alpha = z0 (1+snr z0)^-(beta+1)
        det = Deterministic(z0=1.3)
        qos = QosConfig(theta=0.2, T=2e-3, B=1e5)
        pol = solve_alpha(2.0, qos, det)
        want = 1.3 * (1 + 2.0 * 1.3) ** -(qos.beta + 1)
        assert pol.ln_alpha == pytest.approx(math.log(want), abs=1e-12)

    def test_independent_bisection_oracle(self):
        # re-solve with scipy brentq on the plain (non-log) residual
        qos = QosConfig(theta=0.05, T=2e-3, B=1e5)
        snr = 1.0
        beta = qos.beta

        def residual(a):
            return (
                RAY.expect_above(
                    lambda z: math.expm1(math.log(z / a) / (beta + 1)) / z, a
                )
                - snr
            )

        a_ref = brentq(residual, 1e-6, 10.0, xtol=1e-14)
        pol = solve_alpha(snr, qos, RAY)
        assert pol.alpha == pytest.approx(a_ref, rel=1e-9)

    def test_validation(self):
        with pytest.raises(ValueError):
            solve_alpha(0.0, QOS, RAY)
        with pytest.raises(ValueError):
            solve_alpha(-1.0, QOS, RAY)


class TestSpectralEfficiencyCsir:
    def test_monte_carlo_oracle(self):
        # delta-method error bound on the log of the empirical mean
        qos = QosConfig(theta=0.05, T=2e-3, B=1e5)
        z = np.random.default_rng(42).exponential(1.0, 2_000_000)
        for snr in (0.1, 1.0, 5.0):
            y = np.exp(-qos.beta * np.log1p(snr * z))
            denom = qos.theta * qos.T * qos.B
            est = -math.log(y.mean()) / denom
            sd = y.std() / (y.mean() * math.sqrt(z.size)) / denom
            got = spectral_efficiency_csir(snr, qos, RAY)
            assert abs(got - est) < 5 * sd

    def test_discrete_exact(self):
        qos = QosConfig(theta=0.05, T=2e-3, B=1e5)
        snr = 2.0
        want = -math.log(
            0.2 * (1 + snr * 0.25) ** -qos.beta
            + 0.5 * (1 + snr * 1.0) ** -qos.beta
            + 0.3 * (1 + snr * 4.0) ** -qos.beta
        ) / (qos.theta * qos.T * qos.B)
        assert spectral_efficiency_csir(snr, qos, TAB) == pytest.approx(
            want, rel=1e-12
        )

    def test_theta_zero_raises(self):
        with pytest.raises(ThetaZero):
            spectral_efficiency_csir(1.0, QosConfig(theta=0.0, T=2e-3, B=1e5), RAY)

    def test_zero_snr(self):
        assert spectral_efficiency_csir(0.0, QOS, RAY) == 0.0

    def test_monotone_decreasing_in_theta(self):
        vals = [
            spectral_efficiency_csir(1.0, QosConfig(theta=t, T=2e-3, B=1e5), RAY)
            for t in (0.001, 0.01, 0.1, 1.0, 10.0)
        ]
        assert all(a >= b - 1e-12 for a, b in zip(vals, vals[1:]))

    def test_approaches_shannon_as_theta_vanishes(self):
        qos = QosConfig(theta=1e-7, T=2e-3, B=1e5)
        sh = shannon_limit(1.0, "csir", qos, RAY)
        assert spectral_efficiency_csir(1.0, qos, RAY) == pytest.approx(
            sh, rel=1e-4
        )
        assert spectral_efficiency_csir(1.0, qos, RAY) <= sh

    def test_approaches_delay_limited_as_theta_grows(self):
        qos = QosConfig(theta=200.0, T=2e-3, B=1e5)
        dl = delay_limited_limit(2.0, "csir", TAB)
        got = spectral_efficiency_csir(2.0, qos, TAB)
        assert got >= dl - 1e-12
        assert got == pytest.approx(dl, abs=5e-3)


class TestSpectralEfficiencyCsit:
    def test_monte_carlo_oracle(self):
        qos = QosConfig(theta=0.05, T=2e-3, B=1e5)
        z = np.random.default_rng(43).exponential(1.0, 2_000_000)
        lnz = np.log(z)
        for snr in (0.1, 1.0):
            pol = solve_alpha(snr, qos, RAY)
            p = qos.beta / (qos.beta + 1)
            w = np.where(
                lnz >= pol.ln_alpha, np.exp(-p * (lnz - pol.ln_alpha)), 1.0
            )
            denom = qos.theta * qos.T * qos.B
            est = -math.log(w.mean()) / denom
            sd = w.std() / (w.mean() * math.sqrt(z.size)) / denom
            got = spectral_efficiency_csit(snr, qos, RAY)
            assert abs(got - est) < 5 * sd

    def test_theta_zero_routes_to_water_filling(self):
        qos = QosConfig(theta=0.0, T=2e-3, B=1e5)
        assert spectral_efficiency_csit(1.0, qos, RAY) == pytest.approx(
            shannon_limit(1.0, "csit", qos, RAY), rel=1e-12
        )

    def test_beats_csir(self):
        for model in (RAY, NAK2, TAB):
            for snr in (0.05, 1.0, 8.0):
                csir = spectral_efficiency_csir(snr, QOS, model)
                csit = spectral_efficiency_csit(snr, QOS, model)
                assert csit >= csir - 1e-9

    def test_deterministic_collapse_exact(self):
        det = Deterministic(z0=1.0)
        for theta in (0.01, 1.0, 5.0):
            qos = QosConfig(theta=theta, T=2e-3, B=1e5)
            want = math.log2(1 + 10.0)
            assert spectral_efficiency_csit(10.0, qos, det) == pytest.approx(
                want, abs=1e-12
            )
            assert spectral_efficiency_csir(10.0, qos, det) == pytest.approx(
                want, abs=1e-12
            )

    def test_extreme_qos_stays_finite_and_sandwiched(self):
        # beta ~ 2885: alpha underflows any float, the log-space path holds
        qos = QosConfig(theta=10.0, T=2e-3, B=1e5)
        se = spectral_efficiency_csit(10.0, qos, TAB)
        dl = delay_limited_limit(10.0, "csit", TAB)
        sh = shannon_limit(10.0, "csit", qos, TAB)
        assert dl - 1e-9 <= se <= sh + 1e-9
        assert se == pytest.approx(dl, rel=1e-3)


class TestShannonLimits:
    def test_csir_rayleigh_closed_form(self):
        # E{log2(1+snr z)} = exp(1/snr) E1(1/snr) / ln2 for unit-mean Rayleigh
        for snr in (0.2, 1.0, 10.0):
            want = math.exp(1 / snr) * float(exp1(1 / snr)) / LN2
            got = shannon_limit(snr, "csir", QOS, RAY)
            assert got == pytest.approx(want, rel=1e-9)

    def test_csit_water_filling_oracle(self):
        # independent route: solve the threshold with brentq on closed-form
        # exponential integrals, then integrate the rate
        snr = 1.0

        def wf_residual(a):
            return math.exp(-a) / a - float(exp1(a)) - snr

        a_ref = brentq(wf_residual, 1e-3, 10.0, xtol=1e-14)
        want = float(exp1(a_ref)) / LN2
        got = shannon_limit(snr, "csit", QOS, RAY)
        assert got == pytest.approx(want, rel=1e-9)

    def test_csit_beats_csir(self):
        for model in (RAY, NAK2, TAB):
            r = shannon_limit(1.0, "csir", QOS, model)
            t = shannon_limit(1.0, "csit", QOS, model)
            assert t >= r - 1e-9

    def test_zero_snr(self):
        assert shannon_limit(0.0, "csir", QOS, RAY) == 0.0
        assert shannon_limit(0.0, "csit", QOS, RAY) == 0.0

    def test_discrete_water_filling(self):
        # two-state channel: check against a hand water-filling solution
        tab = BoundedTable(((0.5, 0.5), (2.0, 0.5)))
        snr = 1.0
        got = shannon_limit(snr, "csit", QOS, tab)
        # both states active: 0.5(1/a - 2) + 0.5(1/a - 0.5) = 1 -> a = 0.4444...
        a = 1.0 / (snr + 0.5 * (1 / 0.5 + 1 / 2.0))
        assert a < 0.5  # consistent with both states active
        want = 0.5 * math.log2(0.5 / a) + 0.5 * math.log2(2.0 / a)
        assert got == pytest.approx(want, rel=1e-10)


class TestDelayLimited:
    def test_csir_uses_worst_state(self):
        assert delay_limited_limit(1.0, "csir", RAY) == 0.0
        assert delay_limited_limit(2.0, "csir", TAB) == pytest.approx(
            math.log2(1 + 2.0 * 0.25), rel=1e-12
        )

    def test_csit_inverse_moment(self):
        assert delay_limited_limit(1.0, "csit", NAK2) == pytest.approx(
            math.log2(1 + 1.0 / 2.0), rel=1e-12
        )
        inv = TAB.inverse_moment()
        assert delay_limited_limit(1.0, "csit", TAB) == pytest.approx(
            math.log2(1 + 1 / inv), rel=1e-12
        )

    def test_csit_divergent_warns_and_returns_zero(self):
        with pytest.warns(DivergentInverseMoment):
            val = delay_limited_limit(1.0, "csit", RAY)
        assert val == 0.0


class TestBitEnergy:
    def test_basic(self):
        assert bit_energy(1.0, 2.0) == 0.5
        assert bit_energy_db(1.0, 1.0) == 0.0
        assert to_db(0.0) == -math.inf
        with pytest.raises(ValueError):
            bit_energy(0.0, 1.0)
        with pytest.raises(ValueError):
            bit_energy(1.0, 0.0)


class TestServiceRates:
    def test_csir_formula(self):
        z = np.array([0.0, 1.0, 3.0])
        r = service_rate_csir(2.0, z, QOS)
        want = QOS.B * np.log1p(2.0 * z) / LN2
        assert r == pytest.approx(want, rel=1e-14)

    def test_csit_masked_formula(self):
        pol = solve_alpha(1.0, QOS, RAY)
        z = np.array([pol.alpha / 2, pol.alpha * 2, 5.0])
        r = service_rate_csit(pol, z, QOS)
        assert r[0] == 0.0
        want = QOS.B * (math.log(z[1]) - pol.ln_alpha) / ((pol.beta + 1) * LN2)
        assert r[1] == pytest.approx(want, rel=1e-12)

    def test_csit_rate_matches_policy_capacity(self):
        # log2(1 + mu(z) z) must equal the assigned rate on the active set
        pol = solve_alpha(0.5, QOS, RAY)
        z = np.array([1.0, 2.5])
        mu = power_policy_value(pol, z)
        direct = QOS.B * np.log2(1 + mu * z)
        assert service_rate_csit(pol, z, QOS) == pytest.approx(direct, rel=1e-10)


class TestConcavityAndOrdering:
    def test_concavity_in_snr_quick(self, rng):
        for _ in range(25):
            theta = float(rng.uniform(0.005, 2.0))
            qos = QosConfig(theta=theta, T=2e-3, B=1e5)
            a, b = sorted(rng.uniform(0.01, 10.0, 2))
            if b - a < 1e-3:
                continue
            mid = 0.5 * (a + b)
            f = lambda s: spectral_efficiency_csir(s, qos, RAY)
            assert f(mid) >= 0.5 * (f(a) + f(b)) - 1e-9

    def test_sandwich_quick(self, rng):
        for model in (RAY, NAK2, TAB):
            for theta in (0.01, 1.0):
                qos = QosConfig(theta=theta, T=2e-3, B=1e5)
                for snr in (0.1, 2.0):
                    se = spectral_efficiency_csir(snr, qos, model)
                    dl = delay_limited_limit(snr, "csir", model)
                    sh = shannon_limit(snr, "csir", qos, model)
                    assert dl - 1e-9 <= se <= sh + 1e-9
