"""Channel power-gain distributions.

Every model exposes the same deterministic interface: density, strict CDF
P(Z < z), indicator-weighted expectations E{g(z) 1{z >= lower}}, moments,
support bounds, quantiles, and seeded sampling.  Continuous models compute
expectations by adaptive quadrature on [lower, cutoff] where cutoff is the
1 - 1e-12 quantile; discrete models sum exactly.  The strict-CDF /
non-strict-indicator pair partitions the probability space exactly, which
is what the capacity formulas with a gain threshold rely on.
"""

from __future__ import annotations

import abc
import math
import os
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.special import gammainc, gammaincinv, gammaln

from .errors import NonIntegrable

TAIL_MASS = 1e-12
DEFAULT_QUAD_TOL = 1e-11


def quad_tolerance() -> float:
    """Target relative accuracy for expectations; QOS_ENERGY_QUAD_TOL overrides."""
    return float(os.environ.get("QOS_ENERGY_QUAD_TOL", DEFAULT_QUAD_TOL))


def geometric_points(scale: float, hi: float, factor: float = 10.0, cap: int = 60):
    """Breakpoints scale, scale*factor, ... below hi, for expect_above hints.

    An integrand that decays on a scale much shorter than the integration
    interval (e.g. exp(-c z) with c*hi >> 1) can fall entirely between the
    nodes of the first adaptive panel and be mistaken for zero.  Pinning
    geometrically spaced breakpoints starting at the decay scale forces the
    quadrature to resolve it.
    """
    if not (scale > 0) or not math.isfinite(scale) or scale >= hi:
        return None
    pts = []
    x = scale
    while x < hi and len(pts) < cap:
        pts.append(x)
        x *= factor
    return pts or None


class FadingModel(abc.ABC):
    """Distribution of the instantaneous channel power gain z."""

    kind: str

    @property
    @abc.abstractmethod
    def z_min(self) -> float:
        """Infimum of the support."""

    @property
    @abc.abstractmethod
    def z_max(self) -> float:
        """Essential supremum of the support (may be inf)."""

    @abc.abstractmethod
    def density(self, z: float) -> float:
        """p_z(z); 0 outside the support, inf at a point mass."""

    @abc.abstractmethod
    def cdf(self, z: float) -> float:
        """P(Z < z), strict inequality."""

    @abc.abstractmethod
    def expect_above(
        self, g, lower: float = 0.0, points=None, tol=None, upper=None
    ) -> float:
        """E{g(z) 1{z >= lower}} with deterministic quadrature or exact sums.

        points: optional interior breakpoints hinting where g varies on a
        scale much smaller than the support; tol: override of the relative
        quadrature tolerance; upper: override of the default truncation
        point (needed when g amplifies the far tail).  All three are
        ignored by discrete models, whose sums are exact.
        """

    @abc.abstractmethod
    def moments(self) -> tuple[float, float]:
        """(E{z}, E{z^2})."""

    @abc.abstractmethod
    def inverse_moment(self) -> float:
        """E{1/z}; inf when the integral diverges."""

    @abc.abstractmethod
    def quantile(self, p: float) -> float:
        """Smallest z with P(Z <= z) >= p."""

    @abc.abstractmethod
    def sample(self, rng: np.random.Generator, size=None):
        """Draw i.i.d. gains; identical generator state gives identical draws."""

    def prob_mass_at(self, z: float) -> float:
        """P(Z = z); 0 for continuous models."""
        return 0.0

    @property
    def atoms(self):
        """(values, probabilities) for purely discrete models, else None."""
        return None

    def upper_cutoff(self) -> float:
        """Quadrature endpoint: z_max if finite, else the 1 - TAIL_MASS quantile."""
        if math.isfinite(self.z_max):
            return self.z_max
        return self.quantile(1.0 - TAIL_MASS)


class _ContinuousModel(FadingModel):
    """Shared quadrature plumbing for models with a density."""

    def expect_above(
        self, g, lower: float = 0.0, points=None, tol=None, upper=None
    ) -> float:
        lo = max(lower, self.z_min)
        hi = self.upper_cutoff() if upper is None else upper
        if lo >= hi:
            return 0.0
        if tol is None:
            tol = quad_tolerance()
        inner = None
        if points is not None:
            inner = [p for p in points if lo < p < hi]
            if not inner:
                inner = None
        out = quad(
            lambda z: g(z) * self.density(z),
            lo,
            hi,
            epsabs=1e-16,
            epsrel=tol,
            limit=400,
            points=inner,
            full_output=1,
        )
        value, abserr = out[0], out[1]
        if not math.isfinite(value):
            raise NonIntegrable(f"integral of g against {self.kind} density is not finite")
        if len(out) > 3 and abserr > 1e-7 * max(abs(value), 1.0):
            raise NonIntegrable(
                f"quadrature on [{lo:g}, {hi:g}] did not converge: "
                f"estimate {value:g}, error {abserr:g}"
            )
        return value


@dataclass(frozen=True)
class Rayleigh(_ContinuousModel):
    """Power gain of a Rayleigh-faded link: exponential with the given mean."""

    mean: float = 1.0
    kind = "rayleigh"

    def __post_init__(self):
        if not (self.mean > 0 and math.isfinite(self.mean)):
            raise ValueError(f"mean must be positive and finite, got {self.mean}")

    @property
    def z_min(self) -> float:
        return 0.0

    @property
    def z_max(self) -> float:
        return math.inf

    def density(self, z: float) -> float:
        if z < 0:
            return 0.0
        return math.exp(-z / self.mean) / self.mean

    def cdf(self, z: float) -> float:
        if z <= 0:
            return 0.0
        return -math.expm1(-z / self.mean)

    def moments(self) -> tuple[float, float]:
        return self.mean, 2.0 * self.mean**2

    def inverse_moment(self) -> float:
        return math.inf

    def quantile(self, p: float) -> float:
        if not 0.0 <= p < 1.0:
            if p == 1.0:
                return math.inf
            raise ValueError(f"quantile level must be in [0, 1], got {p}")
        return -self.mean * math.log1p(-p)

    def sample(self, rng: np.random.Generator, size=None):
        return rng.exponential(self.mean, size=size)


@dataclass(frozen=True)
class NakagamiM(_ContinuousModel):
    """Power gain under Nakagami-m fading: Gamma with shape m and mean as given.

    m = 1 recovers the Rayleigh (exponential) gain law.
    """

    m: float
    mean: float = 1.0
    kind = "nakagami"

    def __post_init__(self):
        if not (self.m >= 0.5 and math.isfinite(self.m)):
            raise ValueError(f"shape m must be >= 0.5, got {self.m}")
        if not (self.mean > 0 and math.isfinite(self.mean)):
            raise ValueError(f"mean must be positive and finite, got {self.mean}")

    @property
    def scale(self) -> float:
        return self.mean / self.m

    @property
    def z_min(self) -> float:
        return 0.0

    @property
    def z_max(self) -> float:
        return math.inf

    def density(self, z: float) -> float:
        if z < 0:
            return 0.0
        if z == 0:
            if self.m > 1:
                return 0.0
            if self.m == 1:
                return 1.0 / self.scale
            return math.inf
        logp = (
            (self.m - 1.0) * math.log(z)
            - z / self.scale
            - gammaln(self.m)
            - self.m * math.log(self.scale)
        )
        return math.exp(logp)

    def cdf(self, z: float) -> float:
        if z <= 0:
            return 0.0
        return float(gammainc(self.m, z / self.scale))

    def moments(self) -> tuple[float, float]:
        return self.mean, self.mean**2 * (self.m + 1.0) / self.m

    def inverse_moment(self) -> float:
        if self.m <= 1.0:
            return math.inf
        return 1.0 / (self.scale * (self.m - 1.0))

    def quantile(self, p: float) -> float:
        if not 0.0 <= p < 1.0:
            if p == 1.0:
                return math.inf
            raise ValueError(f"quantile level must be in [0, 1], got {p}")
        return float(gammaincinv(self.m, p)) * self.scale

    def sample(self, rng: np.random.Generator, size=None):
        return rng.gamma(self.m, self.scale, size=size)


@dataclass(frozen=True)
class Deterministic(FadingModel):
    """Unfaded channel: all probability mass at z0."""

    z0: float
    kind = "deterministic"

    def __post_init__(self):
        if not (self.z0 > 0 and math.isfinite(self.z0)):
            raise ValueError(f"z0 must be positive and finite, got {self.z0}")

    @property
    def z_min(self) -> float:
        return self.z0

    @property
    def z_max(self) -> float:
        return self.z0

    def density(self, z: float) -> float:
        return math.inf if z == self.z0 else 0.0

    def cdf(self, z: float) -> float:
        return 0.0 if z <= self.z0 else 1.0

    def expect_above(
        self, g, lower: float = 0.0, points=None, tol=None, upper=None
    ) -> float:
        if self.z0 >= lower:
            return float(g(self.z0))
        return 0.0

    def moments(self) -> tuple[float, float]:
        return self.z0, self.z0**2

    def inverse_moment(self) -> float:
        return 1.0 / self.z0

    def quantile(self, p: float) -> float:
        return self.z0

    def prob_mass_at(self, z: float) -> float:
        return 1.0 if z == self.z0 else 0.0

    @property
    def atoms(self):
        return np.array([self.z0]), np.array([1.0])

    def sample(self, rng: np.random.Generator, size=None):
        if size is None:
            return self.z0
        return np.full(size, self.z0)


class BoundedTable(FadingModel):
    """Finite discrete gain law given as (z, prob) pairs with strictly
    increasing z and probabilities summing to 1."""

    kind = "table"

    def __init__(self, points):
        pts = [(float(z), float(p)) for z, p in points]
        if not pts:
            raise ValueError("table must have at least one (z, prob) point")
        zs = np.array([z for z, _ in pts])
        ps = np.array([p for _, p in pts])
        if np.any(zs < 0):
            raise ValueError("table z values must be >= 0")
        if np.any(np.diff(zs) <= 0):
            raise ValueError("table z values must be strictly increasing")
        if np.any(ps < 0):
            raise ValueError("table probabilities must be >= 0")
        if abs(ps.sum() - 1.0) > 1e-9:
            raise ValueError(f"table probabilities must sum to 1, got {ps.sum()!r}")
        self.zs = zs
        self.ps = ps

    def __repr__(self):
        pts = ", ".join(f"({z:g}, {p:g})" for z, p in zip(self.zs, self.ps))
        return f"BoundedTable([{pts}])"

    def __eq__(self, other):
        return (
            isinstance(other, BoundedTable)
            and np.array_equal(self.zs, other.zs)
            and np.array_equal(self.ps, other.ps)
        )

    @property
    def z_min(self) -> float:
        return float(self.zs[0])

    @property
    def z_max(self) -> float:
        return float(self.zs[-1])

    def density(self, z: float) -> float:
        return math.inf if self.prob_mass_at(z) > 0 else 0.0

    def cdf(self, z: float) -> float:
        return float(self.ps[self.zs < z].sum())

    def expect_above(
        self, g, lower: float = 0.0, points=None, tol=None, upper=None
    ) -> float:
        mask = self.zs >= lower
        if not mask.any():
            return 0.0
        return float(sum(p * g(z) for z, p in zip(self.zs[mask], self.ps[mask])))

    def moments(self) -> tuple[float, float]:
        return float(self.ps @ self.zs), float(self.ps @ self.zs**2)

    def inverse_moment(self) -> float:
        if np.any((self.zs == 0) & (self.ps > 0)):
            return math.inf
        keep = self.ps > 0
        return float(np.sum(self.ps[keep] / self.zs[keep]))

    def quantile(self, p: float) -> float:
        cum = np.cumsum(self.ps)
        idx = int(np.searchsorted(cum, min(p, 1.0) - 1e-15))
        return float(self.zs[min(idx, len(self.zs) - 1)])

    def prob_mass_at(self, z: float) -> float:
        hit = self.zs == z
        return float(self.ps[hit].sum()) if hit.any() else 0.0

    @property
    def atoms(self):
        return self.zs, self.ps

    def sample(self, rng: np.random.Generator, size=None):
        return rng.choice(self.zs, size=size, p=self.ps)


_MODEL_KEYS = {
    "rayleigh": {"mean"},
    "nakagami": {"m", "mean"},
    "deterministic": {"z0"},
    "table": {"points"},
}


def from_config(config: dict) -> FadingModel:
    """Build a model from a {"kind": ..., ...} mapping; unknown keys are errors."""
    if not isinstance(config, dict):
        raise ValueError(f"model config must be a mapping, got {type(config).__name__}")
    kind = config.get("kind")
    if kind not in _MODEL_KEYS:
        raise ValueError(
            f"unknown model kind {kind!r}; expected one of {sorted(_MODEL_KEYS)}"
        )
    extra = set(config) - {"kind"} - _MODEL_KEYS[kind]
    if extra:
        raise ValueError(f"unknown keys for model {kind!r}: {sorted(extra)}")
    if kind == "rayleigh":
        return Rayleigh(mean=float(config.get("mean", 1.0)))
    if kind == "nakagami":
        if "m" not in config:
            raise ValueError("nakagami model requires the shape key 'm'")
        return NakagamiM(m=float(config["m"]), mean=float(config.get("mean", 1.0)))
    if kind == "deterministic":
        if "z0" not in config:
            raise ValueError("deterministic model requires the key 'z0'")
        return Deterministic(z0=float(config["z0"]))
    return BoundedTable(config.get("points") or ())
