"""Fading model distributions, expectations, and config parsing."""

import math

import numpy as np
import pytest
from scipy.special import gammainc

from qos_energy import (
    BoundedTable,
    Deterministic,
    NakagamiM,
    NonIntegrable,
    Rayleigh,
    from_config,
)
from qos_energy.fading import geometric_points, quad_tolerance


class TestRayleigh:
    def test_moments_closed_form(self):
        ray = Rayleigh(mean=1.7)
        m1, m2 = ray.moments()
        assert m1 == pytest.approx(1.7, rel=1e-14)
        assert m2 == pytest.approx(2 * 1.7**2, rel=1e-14)

    def test_cdf_quantile_roundtrip(self):
        ray = Rayleigh(mean=0.8)
        for p in (1e-9, 0.1, 0.5, 0.99, 1 - 1e-9):
            z = ray.quantile(p)
            assert ray.cdf(z) == pytest.approx(p, rel=1e-10, abs=1e-14)

    def test_expect_above_closed_form(self):
        # E{z 1{z >= a}} = (a + 1) exp(-a) for a unit-mean exponential.
        # The z weight amplifies the 1e-12 tail mass beyond the integration
        # cutoff to ~1e-8 relative, hence the tolerance.
        ray = Rayleigh()
        for a in (0.0, 0.3, 2.0, 8.0):
            got = ray.expect_above(lambda z: z, a)
            want = (a + 1.0) * math.exp(-a)
            assert got == pytest.approx(want, rel=2e-8)

    def test_density_integrates_to_one(self):
        ray = Rayleigh(mean=2.5)
        assert ray.expect_above(lambda z: 1.0, 0.0) == pytest.approx(1.0, rel=1e-9)

    def test_inverse_moment_diverges(self):
        assert Rayleigh().inverse_moment() == math.inf

    def test_support(self):
        ray = Rayleigh()
        assert ray.z_min == 0.0
        assert math.isinf(ray.z_max)
        assert ray.prob_mass_at(1.0) == 0.0
        assert ray.atoms is None

    def test_sampling_deterministic_and_distributed(self):
        ray = Rayleigh(mean=2.0)
        a = ray.sample(np.random.default_rng(5), 1000)
        b = ray.sample(np.random.default_rng(5), 1000)
        assert np.array_equal(a, b)
        big = ray.sample(np.random.default_rng(6), 200_000)
        assert big.mean() == pytest.approx(2.0, rel=0.02)

    def test_validation(self):
        with pytest.raises(ValueError):
            Rayleigh(mean=0.0)
        with pytest.raises(ValueError):
            Rayleigh(mean=-1.0)


class TestNakagami:
    def test_density_normalizes(self):
        for m in (0.5, 1.0, 2.0, 4.7):
            nak = NakagamiM(m=m, mean=1.3)
            assert nak.expect_above(lambda z: 1.0, 0.0) == pytest.approx(
                1.0, rel=1e-8
            )

    def test_moments(self):
        nak = NakagamiM(m=3.0, mean=0.9)
        m1, m2 = nak.moments()
        assert m1 == pytest.approx(0.9, rel=1e-14)
        assert m2 == pytest.approx(0.9**2 * 4 / 3, rel=1e-14)
        quad_m2 = nak.expect_above(lambda z: z * z, 0.0)
        assert quad_m2 == pytest.approx(m2, rel=1e-9)

    def test_m_equal_one_matches_rayleigh(self):
        nak = NakagamiM(m=1.0, mean=1.4)
        ray = Rayleigh(mean=1.4)
        for z in (0.01, 0.5, 1.4, 6.0):
            assert nak.density(z) == pytest.approx(ray.density(z), rel=1e-12)
            assert nak.cdf(z) == pytest.approx(ray.cdf(z), rel=1e-12)

    def test_cdf_matches_gammainc(self):
        nak = NakagamiM(m=2.5, mean=1.0)
        for z in (0.1, 1.0, 3.0):
            assert nak.cdf(z) == pytest.approx(
                float(gammainc(2.5, z / nak.scale)), rel=1e-12
            )

    def test_inverse_moment(self):
        nak = NakagamiM(m=2.0, mean=1.0)
        # E{1/z} = 1/(scale (m-1)) = 2 for m=2, mean=1
        assert nak.inverse_moment() == pytest.approx(2.0, rel=1e-12)
        quad = nak.expect_above(lambda z: 1.0 / z, 0.0)
        assert quad == pytest.approx(2.0, rel=1e-7)
        assert NakagamiM(m=1.0, mean=1.0).inverse_moment() == math.inf
        assert NakagamiM(m=0.5, mean=1.0).inverse_moment() == math.inf

    def test_quantile_roundtrip(self):
        nak = NakagamiM(m=0.8, mean=2.0)
        for p in (0.01, 0.4, 0.97):
            assert nak.cdf(nak.quantile(p)) == pytest.approx(p, rel=1e-10)

    def test_half_m_density_edge(self):
        nak = NakagamiM(m=0.5, mean=1.0)
        assert math.isinf(nak.density(0.0))
        assert nak.expect_above(lambda z: 1.0, 0.0) == pytest.approx(1.0, rel=1e-8)

    def test_validation(self):
        with pytest.raises(ValueError):
            NakagamiM(m=0.49, mean=1.0)
        with pytest.raises(ValueError):
            NakagamiM(m=2.0, mean=0.0)

    def test_sampling_moments(self):
        nak = NakagamiM(m=2.0, mean=1.5)
        z = nak.sample(np.random.default_rng(7), 400_000)
        assert z.mean() == pytest.approx(1.5, rel=0.02)
        assert (z * z).mean() == pytest.approx(1.5**2 * 1.5, rel=0.03)


class TestDeterministic:
    def test_point_mass(self):
        det = Deterministic(z0=2.0)
        assert det.z_min == det.z_max == 2.0
        assert det.cdf(2.0) == 0.0  # strictly-below convention
        assert det.cdf(2.0000001) == 1.0
        assert det.prob_mass_at(2.0) == 1.0
        assert det.prob_mass_at(1.0) == 0.0
        assert det.inverse_moment() == 0.5
        assert det.moments() == (2.0, 4.0)

    def test_expect_above_threshold(self):
        det = Deterministic(z0=1.5)
        assert det.expect_above(lambda z: z * 10, 1.5) == 15.0
        assert det.expect_above(lambda z: z * 10, 1.5000001) == 0.0

    def test_sample_constant(self):
        det = Deterministic(z0=0.7)
        z = det.sample(np.random.default_rng(1), 17)
        assert np.all(z == 0.7) and z.shape == (17,)


class TestBoundedTable:
    def test_basic_stats(self):
        tab = BoundedTable(((0.5, 0.25), (1.0, 0.5), (3.0, 0.25)))
        m1, m2 = tab.moments()
        assert m1 == pytest.approx(0.5 * 0.25 + 0.5 + 0.75)
        assert m2 == pytest.approx(0.25 * 0.25 + 0.5 + 9 * 0.25)
        assert tab.z_min == 0.5 and tab.z_max == 3.0
        assert tab.inverse_moment() == pytest.approx(0.5 + 0.5 + 0.25 / 3)

    def test_cdf_is_strictly_below(self):
        tab = BoundedTable(((1.0, 0.4), (2.0, 0.6)))
        assert tab.cdf(1.0) == 0.0
        assert tab.cdf(1.5) == pytest.approx(0.4)
        assert tab.cdf(2.0) == pytest.approx(0.4)
        assert tab.cdf(2.5) == 1.0

    def test_expect_above_includes_threshold_atom(self):
        tab = BoundedTable(((1.0, 0.4), (2.0, 0.6)))
        assert tab.expect_above(lambda z: 1.0, 2.0) == pytest.approx(0.6)
        assert tab.expect_above(lambda z: z, 0.0) == pytest.approx(1.6)

    def test_quantile(self):
        tab = BoundedTable(((1.0, 0.4), (2.0, 0.6)))
        assert tab.quantile(0.2) == 1.0
        assert tab.quantile(0.4) == 1.0
        assert tab.quantile(0.41) == 2.0
        assert tab.quantile(1.0) == 2.0

    def test_atom_at_zero_divergent_inverse_moment(self):
        tab = BoundedTable(((0.0, 0.1), (1.0, 0.9)))
        assert tab.inverse_moment() == math.inf

    def test_sampling_frequencies(self):
        tab = BoundedTable(((1.0, 0.3), (2.0, 0.7)))
        z = tab.sample(np.random.default_rng(11), 100_000)
        assert np.mean(z == 2.0) == pytest.approx(0.7, abs=0.01)

    def test_validation(self):
        with pytest.raises(ValueError):
            BoundedTable(((2.0, 0.5), (1.0, 0.5)))  # not increasing
        with pytest.raises(ValueError):
            BoundedTable(((1.0, 0.6), (2.0, 0.6)))  # mass sums to 1.2
        with pytest.raises(ValueError):
            BoundedTable(((-1.0, 0.5), (2.0, 0.5)))  # negative gain
        with pytest.raises(ValueError):
            BoundedTable(())


class TestFromConfig:
    def test_all_kinds(self):
        assert from_config({"kind": "rayleigh", "mean": 2.0}) == Rayleigh(mean=2.0)
        assert from_config({"kind": "nakagami", "m": 2, "mean": 1.0}) == NakagamiM(
            m=2, mean=1.0
        )
        assert from_config({"kind": "deterministic", "z0": 1.5}) == Deterministic(
            z0=1.5
        )
        tab = from_config({"kind": "table", "points": [[1.0, 0.4], [2.0, 0.6]]})
        assert tab == BoundedTable(((1.0, 0.4), (2.0, 0.6)))

    def test_rejects_unknown_kind(self):
        with pytest.raises(ValueError, match="kind"):
            from_config({"kind": "rician"})

    def test_rejects_unknown_key(self):
        with pytest.raises(ValueError):
            from_config({"kind": "rayleigh", "sigma": 1.0})

    def test_rejects_missing_required(self):
        with pytest.raises(ValueError):
            from_config({"kind": "nakagami", "mean": 1.0})
        with pytest.raises(ValueError):
            from_config({"kind": "deterministic"})


class TestQuadPlumbing:
    def test_tolerance_env_override(self, monkeypatch):
        monkeypatch.delenv("QOS_ENERGY_QUAD_TOL", raising=False)
        assert quad_tolerance() == 1e-11
        monkeypatch.setenv("QOS_ENERGY_QUAD_TOL", "1e-6")
        assert quad_tolerance() == 1e-6

    def test_geometric_points(self):
        pts = geometric_points(0.01, 5.0)
        assert pts == [0.01, 0.1, 1.0]
        assert geometric_points(10.0, 5.0) is None
        assert geometric_points(0.0, 5.0) is None
        assert geometric_points(math.inf, 5.0) is None

    def test_sharp_integrand_resolved(self):
        # exp(-c z) with c so large the mass sits in the first 1e-4 of the
        # integration interval; breakpoints keep the quadrature honest.
        ray = Rayleigh()
        c = 5e4
        pts = geometric_points(1.0 / c, ray.upper_cutoff())
        got = ray.expect_above(lambda z: math.exp(-c * z), 0.0, points=pts)
        assert got == pytest.approx(1.0 / (1.0 + c), rel=1e-8)

    def test_upper_cutoff(self):
        ray = Rayleigh()
        assert ray.upper_cutoff() == pytest.approx(ray.quantile(1 - 1e-12))
        tab = BoundedTable(((1.0, 1.0),))
        assert tab.upper_cutoff() == 1.0

    def test_nonintegrable_raises(self):
        ray = Rayleigh()
        with pytest.raises(NonIntegrable):
            ray.expect_above(lambda z: 1.0 / (z - 1.0), 0.0)
