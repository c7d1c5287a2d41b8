"""Minimum bit energy and wideband slope in the two low-SNR regimes.

Spectral efficiency versus Eb/N0 near the minimum bit energy is captured by
two numbers: the bit-energy floor Eb/N0|min and the slope

    S0 = lim 2 * (se * ln2)^2 / (2nd order deficit)

in bits/s/Hz per 3 dB.  Two limits produce low SNR.  In the "lowpower"
regime the bandwidth B is fixed and the power P goes to zero, so the QoS
exponent enters only through beta = theta*T*B/ln2.  In the "wideband"
regime P is fixed and B grows without bound; with zeta = 1/B the relevant
channel statistic becomes the Laplace-type transform E{exp(-c z)} with
c = theta*T*Pbar/N0 / ln2, and bit energies depend on theta and T
separately.

CSIR formulas:
    lowpower:  Eb/N0|min = ln2 / E{z}
               S0 = 2 / ((beta+1) E{z^2}/E{z}^2 - beta)
    wideband:  Eb/N0|min = -theta*T*(Pbar/N0) / ln E{exp(-c z)}
               S0 = 2 E{exp(-c z)} (ln E{exp(-c z)})^2
                    / (c^2 E{z^2 exp(-c z)})

CSIT formulas (transmitter adapts power to the fading state):
    lowpower:  Eb/N0|min = ln2 / z_max, with S0 = 0 for unbounded gains.
               For bounded gains carrying probability mass p at z_max,
               expanding the rate function to second order in the power
               gives S0 = 2 p / (beta (1 - p) + 1).
    wideband:  the threshold alpha* solves E{ln(z/alpha) (1/z), z>=alpha} = c,
               xi = F(alpha*) + alpha* E{(1/z), z >= alpha*},
               Eb/N0|min = -theta*T*(Pbar/N0) / ln xi,
               S0 = xi (ln xi)^2 ln2
                    / (theta*T*(Pbar/N0 * alpha* + alpha_dot(0) * E{(1/z), z>=alpha*}))
               where alpha_dot(0) is the derivative of the finite-bandwidth
               threshold alpha(zeta) at zeta = 0.

alpha_dot(0) has no closed form for general fading, so it is estimated by
one-sided finite differences of ln alpha(zeta) at zeta_k = zeta_0 / 2^k,
k = 0..6, combined with Richardson extrapolation.  Differencing ln alpha
rather than alpha keeps the estimate conditioned even when alpha* is tiny,
since d(ln alpha)/dzeta = alpha_dot / alpha* is scale-free.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .effcap import LN2, _solve_alpha_ln, solve_threshold
from .errors import NumericalError
from .fading import FadingModel, geometric_points

_DB_PER_FACTOR2 = 10.0 * math.log10(2.0)


@dataclass(frozen=True)
class AsymptoticSummary:
    """Bit-energy floor and wideband slope for one mode/regime combination.

    ebn0_min_db is -inf (never NaN) when the linear floor is 0, which
    happens for CSIT with unbounded gains; unbounded_support flags it.
    """

    ebn0_min_linear: float
    ebn0_min_db: float
    slope_s0: float
    regime: str
    mode: str
    unbounded_support: bool = False


@dataclass(frozen=True)
class AlphaStarSolution:
    """Zero-bandwidth-cost threshold for CSIT in the wideband regime.

    alpha_star satisfies E{ln(z/alpha*) (1/z), z >= alpha*} = c and xi is
    the resulting Laplace-type transform value; ln_alpha_star and ln_xi are
    kept alongside because both quantities underflow for strong QoS.
    alpha_dot_zero is d alpha(zeta)/d zeta at zeta = 0 (None when not
    requested or at theta = 0); dln_alpha_dzeta = alpha_dot_zero/alpha_star
    is the scale-free form actually estimated.
    """

    alpha_star: float
    xi: float
    alpha_dot_zero: float | None
    ln_alpha_star: float
    ln_xi: float
    dln_alpha_dzeta: float | None = None


def _check_wideband_args(theta: float, T: float, pbar_over_n0: float) -> None:
    if not (theta >= 0 and math.isfinite(theta)):
        raise ValueError(f"theta must be finite and >= 0, got {theta}")
    if not (T > 0 and math.isfinite(T)):
        raise ValueError(f"T must be positive, got {T}")
    if not (pbar_over_n0 > 0 and math.isfinite(pbar_over_n0)):
        raise ValueError(f"pbar_over_n0 must be positive, got {pbar_over_n0}")


def lowpower_csir(model: FadingModel, beta: float) -> AsymptoticSummary:
    """Fixed-bandwidth low-power limits with receiver-only CSI.

    Eb/N0|min = ln2/E{z} regardless of beta (QoS is free at the floor);
    the slope S0 = 2/((beta+1) kappa - beta) with kappa = E{z^2}/E{z}^2
    shrinks as the QoS constraint tightens.
    """
    if not (beta >= 0 and math.isfinite(beta)):
        raise ValueError(f"beta must be finite and >= 0, got {beta}")
    m1, m2 = model.moments()
    kurt = m2 / (m1 * m1)
    lin = LN2 / m1
    s0 = 2.0 / ((beta + 1.0) * kurt - beta)
    return AsymptoticSummary(
        ebn0_min_linear=lin,
        ebn0_min_db=10.0 * math.log10(lin),
        slope_s0=s0,
        regime="lowpower",
        mode="csir",
    )


def lowpower_csit(model: FadingModel, beta: float = 0.0) -> AsymptoticSummary:
    """Fixed-bandwidth low-power limits when the transmitter rides the peak.

    All power concentrates on gains near z_max, so Eb/N0|min = ln2/z_max.
    With unbounded gains the floor is 0 linear (-inf dB) and the approach
    is infinitely slow: S0 = 0.  A bounded model with probability mass p
    at z_max behaves like an AWGN channel of gain z_max seen through a
    p-thinned frame process, which second-order expansion turns into
    S0 = 2 p / (beta (1 - p) + 1); a continuous density at z_max has p = 0
    and again S0 = 0.
    """
    if not (beta >= 0 and math.isfinite(beta)):
        raise ValueError(f"beta must be finite and >= 0, got {beta}")
    zmax = model.z_max
    if math.isinf(zmax):
        return AsymptoticSummary(
            ebn0_min_linear=0.0,
            ebn0_min_db=-math.inf,
            slope_s0=0.0,
            regime="lowpower",
            mode="csit",
            unbounded_support=True,
        )
    p = model.prob_mass_at(zmax)
    lin = LN2 / zmax
    s0 = 2.0 * p / (beta * (1.0 - p) + 1.0)
    return AsymptoticSummary(
        ebn0_min_linear=lin,
        ebn0_min_db=10.0 * math.log10(lin),
        slope_s0=s0,
        regime="lowpower",
        mode="csit",
    )


def _laplace_pair(model: FadingModel, c: float) -> tuple[float, float]:
    """(ln E{exp(-c z)}, E{z^2 exp(-c z)} / E{exp(-c z)}) computed stably."""
    at = model.atoms
    if at is not None:
        zs, ps = at
        keep = ps > 0
        t = np.log(ps[keep]) - c * zs[keep]
        tmax = float(t.max())
        u = np.exp(t - tmax)
        su = float(u.sum())
        ln_l = tmax + math.log(su)
        ratio = float(np.dot(zs[keep] ** 2, u)) / su
        return ln_l, ratio
    # The slope must reproduce closed forms to ~1e-10 relative, which needs
    # both a tighter quadrature tolerance and a deeper tail cutoff: the z^2
    # weight amplifies the truncated mass by ~cutoff^2.
    hi = model.z_max
    if math.isinf(hi):
        hi = model.quantile(1.0 - 1e-15)
    pts = geometric_points(1.0 / c, hi) if c > 0 else None
    lap = model.expect_above(
        lambda z: math.exp(-c * z), 0.0, points=pts, tol=1e-13, upper=hi
    )
    m2 = model.expect_above(
        lambda z: z * z * math.exp(-c * z), 0.0, points=pts, tol=1e-13, upper=hi
    )
    return math.log(lap), m2 / lap


def wideband_csir(
    model: FadingModel, theta: float, T: float, pbar_over_n0: float
) -> AsymptoticSummary:
    """Fixed-power wideband limits with receiver-only CSI.

    With c = theta*T*(Pbar/N0)/ln2 and L = E{exp(-c z)}:
        Eb/N0|min = -theta*T*(Pbar/N0) / ln L
        S0 = 2 L (ln L)^2 / (c^2 E{z^2 exp(-c z)})
    At theta = 0 both collapse to the fixed-bandwidth values at beta = 0
    (Jensen: the floor always sits at or above ln2/E{z}).
    """
    _check_wideband_args(theta, T, pbar_over_n0)
    if theta == 0:
        return replace(lowpower_csir(model, 0.0), regime="wideband")
    x = theta * T * pbar_over_n0
    c = x / LN2
    ln_l, z2_ratio = _laplace_pair(model, c)
    lin = -x / ln_l
    s0 = 2.0 * ln_l * ln_l / (c * c * z2_ratio)
    return AsymptoticSummary(
        ebn0_min_linear=lin,
        ebn0_min_db=10.0 * math.log10(lin),
        slope_s0=s0,
        regime="wideband",
        mode="csir",
    )


def wideband_csir_rayleigh_closed_form(
    theta: float, T: float, pbar_over_n0: float
) -> AsymptoticSummary:
    """Unit-mean Rayleigh wideband CSIR limits in closed form.

    E{exp(-c z)} = 1/(1+c) turns the general expressions into
        Eb/N0|min = theta*T*(Pbar/N0) / ln(1+c)
        S0 = ((1 + 1/c) ln(1+c))^2
    which the quadrature route must reproduce; both tend to the
    fixed-bandwidth values ln2 and 2 as theta -> 0.
    """
    _check_wideband_args(theta, T, pbar_over_n0)
    if theta == 0:
        raise ValueError("closed form needs theta > 0; use wideband_csir for theta = 0")
    x = theta * T * pbar_over_n0
    c = x / LN2
    lin = x / math.log1p(c)
    s0 = ((1.0 + 1.0 / c) * math.log1p(c)) ** 2
    return AsymptoticSummary(
        ebn0_min_linear=lin,
        ebn0_min_db=10.0 * math.log10(lin),
        slope_s0=s0,
        regime="wideband",
        mode="csir",
    )


def _fixed_point_residual(model: FadingModel, ln_a: float, c: float) -> float:
    """E{ln(z/a) (1/z), z >= a} - c, the defining equation of alpha*."""
    at = model.atoms
    if at is not None:
        zs, ps = at
        with np.errstate(divide="ignore"):
            lnz = np.where(zs > 0, np.log(np.where(zs > 0, zs, 1.0)), -np.inf)
        mask = (lnz >= ln_a) & (ps > 0)
        if not mask.any():
            return -c
        return float(np.dot(ps[mask], (lnz[mask] - ln_a) / zs[mask])) - c
    a = math.exp(ln_a)
    val = model.expect_above(
        lambda z: (math.log(z) - ln_a) / z,
        a,
        points=geometric_points(a * 10.0, model.upper_cutoff()),
    )
    return val - c


def _inverse_moment_above(model: FadingModel, ln_a: float) -> float:
    """E{(1/z), z >= a}."""
    at = model.atoms
    if at is not None:
        zs, ps = at
        with np.errstate(divide="ignore"):
            lnz = np.where(zs > 0, np.log(np.where(zs > 0, zs, 1.0)), -np.inf)
        mask = (lnz >= ln_a) & (ps > 0)
        if not mask.any():
            return 0.0
        return float(np.sum(ps[mask] / zs[mask]))
    a = math.exp(ln_a)
    return model.expect_above(
        lambda z: 1.0 / z,
        a,
        points=geometric_points(a * 10.0, model.upper_cutoff()),
    )


def _ln_xi(model: FadingModel, ln_a: float) -> float:
    """ln(F(a) + a E{(1/z), z >= a}), stable when a underflows."""
    at = model.atoms
    if at is not None:
        zs, ps = at
        with np.errstate(divide="ignore"):
            lnz = np.where(zs > 0, np.log(np.where(zs > 0, zs, 1.0)), -np.inf)
        mask = (lnz >= ln_a) & (ps > 0)
        below = float(ps[~(lnz >= ln_a)].sum())
        terms = []
        if mask.any():
            terms.append(np.log(ps[mask]) + ln_a - lnz[mask])
        if below > 0:
            terms.append(np.array([math.log(below)]))
        if not terms:
            raise NumericalError("xi evaluated with no probability mass")
        allt = np.concatenate(terms)
        tmax = float(allt.max())
        return tmax + math.log(float(np.exp(allt - tmax).sum()))
    a = math.exp(ln_a)
    xi = model.cdf(a) + a * _inverse_moment_above(model, ln_a)
    return math.log(xi)


def _richardson_first_order(d: np.ndarray) -> float:
    """Extrapolate one-sided difference quotients sampled at h, h/2, h/4, ...

    Each stage cancels the leading O(h^j) error term of a first-order
    quotient, assuming successive halving of the step.
    """
    r = np.asarray(d, dtype=float)
    for j in range(1, len(d)):
        w = 2.0**j
        r = (w * r[1:] - r[:-1]) / (w - 1.0)
    return float(r[0])


def solve_alpha_star(
    model: FadingModel,
    theta: float,
    T: float,
    pbar_over_n0: float,
    compute_derivative: bool = True,
) -> AlphaStarSolution:
    """Threshold of the wideband CSIT policy at zero spectral cost.

    alpha(zeta) is the power-constrained threshold at bandwidth 1/zeta; as
    zeta -> 0 the power constraint degenerates into the log-moment equation
    E{ln(z/alpha*) (1/z), z >= alpha*} = c solved here by bisection in
    ln(alpha).  The slope estimate alpha_dot(0) comes from Richardson
    extrapolation of (ln alpha(zeta_k) - ln alpha*)/zeta_k over halved
    steps zeta_k = zeta_0/2^k, k = 0..6, with zeta_0 = 1e-3 * theta*T/ln2,
    scaled back by alpha* at the end.  At theta = 0 the threshold escapes
    to z_max and xi = 1; the derivative is reported as None there.
    """
    _check_wideband_args(theta, T, pbar_over_n0)
    if theta == 0:
        zmax = model.z_max
        ln_zmax = math.log(zmax) if zmax > 0 else -math.inf
        return AlphaStarSolution(
            alpha_star=zmax,
            xi=1.0,
            alpha_dot_zero=None,
            ln_alpha_star=ln_zmax,
            ln_xi=0.0,
            dln_alpha_dzeta=None,
        )
    c = theta * T * pbar_over_n0 / LN2
    lo = math.log(1e-12)
    hi = math.log(model.upper_cutoff())
    ln_star = solve_threshold(
        lambda ln_a: _fixed_point_residual(model, ln_a, c),
        lo,
        hi,
        what="wideband CSIT threshold alpha*",
    )
    ln_xi = _ln_xi(model, ln_star)
    alpha_star = math.exp(ln_star)
    xi = math.exp(ln_xi)
    dln = None
    a_dot = None
    if compute_derivative:
        zeta0 = 1e-3 * theta * T / LN2
        quotients = []
        for k in range(7):
            zeta = zeta0 / 2.0**k
            beta = theta * T / (zeta * LN2)
            ln_k = _solve_alpha_ln(pbar_over_n0 * zeta, beta, model)
            quotients.append((ln_k - ln_star) / zeta)
        dln = _richardson_first_order(np.array(quotients))
        a_dot = dln * alpha_star
    return AlphaStarSolution(
        alpha_star=alpha_star,
        xi=xi,
        alpha_dot_zero=a_dot,
        ln_alpha_star=ln_star,
        ln_xi=ln_xi,
        dln_alpha_dzeta=dln,
    )


def wideband_csit(
    model: FadingModel, theta: float, T: float, pbar_over_n0: float
) -> AsymptoticSummary:
    """Fixed-power wideband limits when the transmitter adapts its power.

    Eb/N0|min = -theta*T*(Pbar/N0)/ln xi with xi from solve_alpha_star, and

        S0 = xi (ln xi)^2 ln2
             / (theta*T*(Pbar/N0 * alpha* + alpha_dot(0) E{(1/z), z>=alpha*}))

    evaluated as exp(ln xi - ln alpha*) (ln xi)^2 ln2 / (theta*T*(Pbar/N0 +
    dln_alpha_dzeta * E{...})) so that tiny alpha* and xi cancel instead of
    underflowing.  theta = 0 routes to the fixed-bandwidth CSIT limits.
    """
    _check_wideband_args(theta, T, pbar_over_n0)
    if theta == 0:
        return replace(lowpower_csit(model, 0.0), regime="wideband")
    sol = solve_alpha_star(model, theta, T, pbar_over_n0, compute_derivative=True)
    inv_above = _inverse_moment_above(model, sol.ln_alpha_star)
    lin = -theta * T * pbar_over_n0 / sol.ln_xi
    denom = pbar_over_n0 + sol.dln_alpha_dzeta * inv_above
    if not (denom > 0) or not math.isfinite(denom):
        raise NumericalError(
            f"wideband CSIT slope denominator {denom:g} is not positive; "
            "the threshold derivative estimate is unusable here"
        )
    s0 = (
        math.exp(sol.ln_xi - sol.ln_alpha_star)
        * sol.ln_xi
        * sol.ln_xi
        * LN2
        / (theta * T * denom)
    )
    return AsymptoticSummary(
        ebn0_min_linear=lin,
        ebn0_min_db=10.0 * math.log10(lin),
        slope_s0=s0,
        regime="wideband",
        mode="csit",
    )


def linear_approx(ebn0_db, summary: AsymptoticSummary):
    """First-order spectral efficiency S0/(10 log10 2) * (Eb/N0|dB - min dB).

    Valid only near the floor; raises ValueError when the floor is -inf dB
    (unbounded-gain CSIT), where no linear approximation exists.
    """
    if not math.isfinite(summary.ebn0_min_db):
        raise ValueError(
            "linear approximation undefined: bit-energy floor is not finite "
            f"({summary.mode}/{summary.regime} with unbounded gains)"
        )
    x = np.asarray(ebn0_db, dtype=float)
    out = summary.slope_s0 / _DB_PER_FACTOR2 * (x - summary.ebn0_min_db)
    if np.ndim(ebn0_db) == 0:
        return float(out)
    return out


def delta_bit_energy(se: float, s0_first: float, s0_second: float) -> float:
    """Extra bit energy in dB at spectral efficiency se when the slope drops.

    Near a shared floor, moving from slope s0_first to s0_second costs
    (1/s0_second - 1/s0_first) * se * 10 log10 2 dB at fixed se.
    """
    if not (se > 0):
        raise ValueError(f"spectral efficiency must be positive, got {se}")
    if not (s0_first > 0 and s0_second > 0):
        raise ValueError("slopes must be positive to compare bit energies")
    return (1.0 / s0_second - 1.0 / s0_first) * se * _DB_PER_FACTOR2
