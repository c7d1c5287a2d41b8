"""Effective capacity and spectral efficiency under block fading.

With a QoS exponent theta > 0, frame length T and bandwidth B, the service
process R[i] = B log2(1 + SNR z[i]) (receiver CSI) or
B log2(1 + mu_opt(theta, z) z) (transmitter and receiver CSI) has effective
capacity

    C_E = -(1/(theta T)) ln E{exp(-theta T R)}            [bits/s]

which this module evaluates per bandwidth unit (bits/s/Hz) using
beta = theta*T*B/ln2:

    csir:  -(1/(theta T B)) ln E{(1 + SNR z)^(-beta)}
    csit:  -(1/(theta T B)) ln (F(alpha) + E{(z/alpha)^(-beta/(beta+1)) 1{z>=alpha}})

The transmitter-CSI power adaptation is a gain threshold policy

    mu_opt(theta, z) = 1/(alpha^(1/(beta+1)) z^(beta/(beta+1))) - 1/z   for z >= alpha

with alpha set so E{mu_opt} equals the average SNR.  theta = 0 degenerates
to the ergodic (Shannon) limits: the csir formula becomes E{log2(1+SNR z)}
and the threshold equation becomes classical water-filling (beta = 0).

All solves run on ln(alpha): the threshold shrinks like
(1+SNR z)^-(beta+1) for degenerate channels and would underflow long
before its logarithm does.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .errors import BracketFailure, DivergentInverseMoment, ThetaZero
from .fading import FadingModel, geometric_points

LN2 = math.log(2.0)

_LN_ALPHA_TOL = 1e-13
_MAX_BISECT = 300
_MAX_EXPAND = 60


@dataclass(frozen=True)
class QosConfig:
    """QoS exponent theta (1/bits), frame duration T (s), bandwidth B (Hz)."""

    theta: float
    T: float
    B: float

    def __post_init__(self):
        if not (self.theta >= 0 and math.isfinite(self.theta)):
            raise ValueError(f"theta must be >= 0 and finite, got {self.theta}")
        if not (self.T > 0 and math.isfinite(self.T)):
            raise ValueError(f"T must be positive and finite, got {self.T}")
        if not (self.B > 0 and math.isfinite(self.B)):
            raise ValueError(f"B must be positive and finite, got {self.B}")

    @property
    def beta(self) -> float:
        """Normalized QoS exponent theta*T*B/ln2."""
        return self.theta * self.T * self.B / LN2

    @property
    def zeta(self) -> float:
        """Inverse bandwidth 1/B."""
        return 1.0 / self.B


@dataclass(frozen=True)
class PowerPolicy:
    """Threshold power adaptation: zero power below the gain cutoff alpha.

    ln_alpha is the primary representation; alpha itself may underflow to 0
    for very large beta without harming evaluation.
    """

    alpha: float
    beta: float
    ln_alpha: float = None

    def __post_init__(self):
        if self.ln_alpha is None:
            if not (self.alpha > 0 and math.isfinite(self.alpha)):
                raise ValueError(f"alpha must be positive and finite, got {self.alpha}")
            object.__setattr__(self, "ln_alpha", math.log(self.alpha))
        if not math.isfinite(self.ln_alpha):
            raise ValueError(f"ln_alpha must be finite, got {self.ln_alpha}")
        if not (self.beta >= 0 and math.isfinite(self.beta)):
            raise ValueError(f"beta must be >= 0 and finite, got {self.beta}")


def power_policy_value(policy: PowerPolicy, z):
    """mu_opt(z): 0 below the threshold, expm1(ln(z/alpha)/(beta+1))/z above.

    Accepts scalars or arrays; continuous (value 0) at z = alpha.
    """
    z_arr = np.asarray(z, dtype=float)
    safe = np.where(z_arr > 0, z_arr, 1.0)
    lnz = np.where(z_arr > 0, np.log(safe), -np.inf)
    above = lnz >= policy.ln_alpha
    mu = np.where(
        above, np.expm1((lnz - policy.ln_alpha) / (policy.beta + 1.0)) / safe, 0.0
    )
    if np.ndim(z) == 0:
        return float(mu)
    return mu


def _mean_policy_power(model: FadingModel, ln_alpha: float, beta: float) -> float:
    """E{mu_opt(z) 1{z >= alpha}} for the threshold exp(ln_alpha)."""
    at = model.atoms
    if at is not None:
        zs, ps = at
        with np.errstate(divide="ignore"):
            lnz = np.where(zs > 0, np.log(np.where(zs > 0, zs, 1.0)), -np.inf)
        mask = lnz >= ln_alpha
        if not mask.any():
            return 0.0
        vals = np.expm1((lnz[mask] - ln_alpha) / (beta + 1.0)) / zs[mask]
        return float(np.dot(ps[mask], vals))
    # Floor the lower limit: for thresholds deep in the subnormal range,
    # expm1(u)/z overflows pointwise even though its product with the
    # density is negligible.  Mass below the floor contributes O(1e-280)
    # for any density bounded near the origin; densities that blow up
    # there (Nakagami m < 1) drive the mean power to astronomical values
    # long before a threshold solve could descend this far.
    lo = max(math.exp(ln_alpha), 1e-280)
    return model.expect_above(
        lambda z: math.expm1((math.log(z) - ln_alpha) / (beta + 1.0)) / z,
        lo,
        points=geometric_points(lo * 10.0, model.upper_cutoff()),
    )


def solve_threshold(residual, lo_ln: float, hi_ln: float, what: str) -> float:
    """Bisect a monotone-decreasing residual in ln(alpha) to _LN_ALPHA_TOL.

    The initial bracket is expanded geometrically (downward first) when the
    residual does not change sign across it.
    """
    span = max(hi_ln - lo_ln, 1.0)
    r_hi = residual(hi_ln)
    expansions = 0
    while r_hi > 0:
        lo_ln = hi_ln
        hi_ln += span
        span *= 2.0
        r_hi = residual(hi_ln)
        expansions += 1
        if expansions > _MAX_EXPAND:
            raise BracketFailure(f"{what}: no upper bracket; residual stays positive")
    r_lo = residual(lo_ln)
    expansions = 0
    while r_lo <= 0:
        hi_ln = lo_ln
        lo_ln -= span
        span *= 2.0
        r_lo = residual(lo_ln)
        expansions += 1
        if expansions > _MAX_EXPAND:
            raise BracketFailure(f"{what}: no lower bracket; residual stays negative")
    for _ in range(_MAX_BISECT):
        mid = 0.5 * (lo_ln + hi_ln)
        if residual(mid) > 0:
            lo_ln = mid
        else:
            hi_ln = mid
        if hi_ln - lo_ln < _LN_ALPHA_TOL:
            break
    return 0.5 * (lo_ln + hi_ln)


def _solve_alpha_ln(snr: float, beta: float, model: FadingModel) -> float:
    """ln(alpha) such that the threshold policy spends exactly snr on average."""
    hi = model.upper_cutoff()
    lo_ln = math.log(1e-12)
    hi_ln = math.log(hi)

    def residual(ln_a: float) -> float:
        return _mean_policy_power(model, ln_a, beta) - snr

    return solve_threshold(residual, lo_ln, hi_ln, "power threshold solve")


def solve_alpha(snr: float, qos: QosConfig, model: FadingModel) -> PowerPolicy:
    """Find the gain cutoff alpha with E{mu_opt} = snr.

    The mean transmit power is strictly decreasing in alpha, so the root is
    unique; theta = 0 (beta = 0) gives the classical water-filling threshold.
    """
    if not (snr > 0 and math.isfinite(snr)):
        raise ValueError(f"snr must be positive and finite, got {snr}")
    beta = qos.beta
    ln_alpha = _solve_alpha_ln(snr, beta, model)
    return PowerPolicy(alpha=math.exp(ln_alpha), beta=beta, ln_alpha=ln_alpha)


def spectral_efficiency_csir(snr: float, qos: QosConfig, model: FadingModel) -> float:
    """-(1/(theta T B)) ln E{(1+snr z)^(-beta)} in bits/s/Hz.

    Raises ThetaZero at theta = 0; that limit is shannon_limit's job.
    """
    if qos.theta == 0:
        raise ThetaZero("spectral_efficiency_csir is 0/0 at theta=0; use shannon_limit")
    if snr < 0:
        raise ValueError(f"snr must be >= 0, got {snr}")
    if snr == 0:
        return 0.0
    beta = qos.beta
    at = model.atoms
    if at is not None:
        zs, ps = at
        keep = ps > 0
        log_e = float(
            logsumexp(np.log(ps[keep]) - beta * np.log1p(snr * zs[keep]))
        )
    else:
        e = model.expect_above(
            lambda z: math.exp(-beta * math.log1p(snr * z)),
            0.0,
            points=geometric_points(1.0 / (1.0 + beta * snr), model.upper_cutoff()),
        )
        log_e = math.log(e)
    return -log_e / (qos.theta * qos.T * qos.B)


def spectral_efficiency_csit(snr: float, qos: QosConfig, model: FadingModel) -> float:
    """Spectral efficiency with the optimal threshold power policy.

    Evaluates -(1/(theta T B)) ln(F(alpha) + E{(z/alpha)^(-beta/(beta+1))
    1{z>=alpha}}) at the solved alpha; theta = 0 routes to the ergodic
    water-filling limit.
    """
    if snr < 0:
        raise ValueError(f"snr must be >= 0, got {snr}")
    if qos.theta == 0:
        return shannon_limit(snr, "csit", qos, model)
    if snr == 0:
        return 0.0
    policy = solve_alpha(snr, qos, model)
    p = policy.beta / (policy.beta + 1.0)
    at = model.atoms
    if at is not None:
        zs, ps = at
        with np.errstate(divide="ignore"):
            lnz = np.where(zs > 0, np.log(np.where(zs > 0, zs, 1.0)), -np.inf)
        below = lnz < policy.ln_alpha
        f_mass = float(ps[below].sum())
        active = ~below & (ps > 0)
        terms = np.log(ps[active]) - p * (lnz[active] - policy.ln_alpha)
        if f_mass > 0:
            terms = np.append(terms, math.log(f_mass))
        log_total = float(logsumexp(terms))
    else:
        alpha = math.exp(policy.ln_alpha)
        e2 = model.expect_above(
            lambda z: math.exp(-p * (math.log(z) - policy.ln_alpha)),
            alpha,
            points=geometric_points(alpha * 10.0, model.upper_cutoff()),
        )
        log_total = math.log(model.cdf(alpha) + e2)
    se = -log_total / (qos.theta * qos.T * qos.B)
    return max(se, 0.0)


def shannon_limit(snr: float, mode: str, qos: QosConfig, model: FadingModel) -> float:
    """Ergodic capacity in bits/s/Hz, the theta -> 0 limit of the above.

    csir: E{log2(1+snr z)}.  csit: water-filling over the gain with the
    beta = 0 threshold.  qos is accepted for signature symmetry; the limit
    does not depend on it.
    """
    _check_mode(mode)
    if snr < 0:
        raise ValueError(f"snr must be >= 0, got {snr}")
    if snr == 0:
        return 0.0
    if mode == "csir":
        return model.expect_above(lambda z: math.log1p(snr * z) / LN2, 0.0)
    ln_alpha = _solve_alpha_ln(snr, 0.0, model)
    at = model.atoms
    if at is not None:
        zs, ps = at
        with np.errstate(divide="ignore"):
            lnz = np.where(zs > 0, np.log(np.where(zs > 0, zs, 1.0)), -np.inf)
        mask = lnz >= ln_alpha
        return float(np.dot(ps[mask], (lnz[mask] - ln_alpha))) / LN2
    alpha = math.exp(ln_alpha)
    return model.expect_above(
        lambda z: (math.log(z) - ln_alpha) / LN2,
        alpha,
        points=geometric_points(alpha * 10.0, model.upper_cutoff()),
    )


def delay_limited_limit(snr: float, mode: str, model: FadingModel) -> float:
    """Rate sustainable in every fading state, the theta -> infinity limit.

    csir: log2(1+snr z_min).  csit: log2(1+snr/E{1/z}) by channel inversion;
    when E{1/z} diverges (e.g. exponential gains) the value is 0 and a
    DivergentInverseMoment warning is issued.
    """
    _check_mode(mode)
    if snr < 0:
        raise ValueError(f"snr must be >= 0, got {snr}")
    if mode == "csir":
        return math.log1p(snr * model.z_min) / LN2
    inv = model.inverse_moment()
    if math.isinf(inv):
        warnings.warn(
            "E{1/z} diverges; delay-limited rate with transmitter CSI is 0",
            DivergentInverseMoment,
            stacklevel=2,
        )
        return 0.0
    return math.log1p(snr / inv) / LN2


def bit_energy(snr: float, spectral_efficiency: float) -> float:
    """Energy per bit over noise density, linear scale: snr/SE."""
    if not snr > 0:
        raise ValueError(f"snr must be positive, got {snr}")
    if not spectral_efficiency > 0:
        raise ValueError(
            f"spectral efficiency must be positive, got {spectral_efficiency}"
        )
    return snr / spectral_efficiency


def bit_energy_db(snr: float, spectral_efficiency: float) -> float:
    """bit_energy in dB."""
    return 10.0 * math.log10(bit_energy(snr, spectral_efficiency))


def to_db(x: float) -> float:
    """10 log10(x); -inf at x = 0."""
    if x == 0:
        return -math.inf
    return 10.0 * math.log10(x)


def service_rate_csir(snr: float, z, qos: QosConfig):
    """Frame service rate B log2(1+snr z) in bits/s (scalar or array z)."""
    return qos.B * np.log1p(snr * np.asarray(z, dtype=float)) / LN2


def service_rate_csit(policy: PowerPolicy, z, qos: QosConfig):
    """Frame service rate B log2(1+mu_opt z) = B ln(z/alpha)/((beta+1) ln2)
    above the cutoff, 0 below (scalar or array z)."""
    z_arr = np.asarray(z, dtype=float)
    safe = np.where(z_arr > 0, z_arr, 1.0)
    lnz = np.where(z_arr > 0, np.log(safe), -np.inf)
    rate = np.where(
        lnz >= policy.ln_alpha,
        qos.B * (lnz - policy.ln_alpha) / ((policy.beta + 1.0) * LN2),
        0.0,
    )
    return rate


def _check_mode(mode: str):
    if mode not in ("csir", "csit"):
        raise ValueError(f"mode must be 'csir' or 'csit', got {mode!r}")
