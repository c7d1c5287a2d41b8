"""Shared helpers for the test suite."""

import numpy as np
import pytest

from qos_energy import BoundedTable, Deterministic, NakagamiM, Rayleigh


def random_model(rng, unit_mean=False, bounded=None):
    """Draw a random fading model for property tests.

    unit_mean pins E{z} = 1; bounded=True restricts to finite z_max,
    bounded=False to unbounded support.
    """
    kinds = ["rayleigh", "rayleigh", "nakagami", "deterministic", "table"]
    if bounded is True:
        kinds = ["deterministic", "table"]
    elif bounded is False:
        kinds = ["rayleigh", "nakagami"]
    kind = kinds[rng.integers(len(kinds))]
    mean = 1.0 if unit_mean else float(rng.uniform(0.3, 3.0))
    if kind == "rayleigh":
        return Rayleigh(mean=mean)
    if kind == "nakagami":
        m = float(rng.uniform(0.5, 6.0))
        return NakagamiM(m=m, mean=mean)
    if kind == "deterministic":
        return Deterministic(z0=mean)
    n = int(rng.integers(2, 6))
    zs = np.sort(rng.uniform(0.05, 4.0, n))
    while np.any(np.diff(zs) < 1e-3):
        zs = np.sort(rng.uniform(0.05, 4.0, n))
    ps = rng.dirichlet(np.ones(n))
    if unit_mean:
        zs = zs / float(ps @ zs)
    return BoundedTable(tuple((float(z), float(p)) for z, p in zip(zs, ps)))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
