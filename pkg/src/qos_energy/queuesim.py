"""Monte Carlo validation of the QoS exponent via a discrete-time queue.

A buffer is fed at constant rate a bits/s and drained each frame of length
T by the instantaneous service the fading channel supports, following the
Lindley recursion Q_{n+1} = max(Q_n + a*T - s_n, 0).  Large deviations
predict P(Q > q) ~ exp(-theta_hat * q) where theta_hat solves
a = effective_capacity(theta_hat); feeding at a = C_E(theta*) therefore
makes the fitted tail decay equal theta* itself, which is the check the
simulator exists to run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .effcap import (
    QosConfig,
    service_rate_csir,
    service_rate_csit,
    shannon_limit,
    solve_alpha,
    spectral_efficiency_csir,
    spectral_efficiency_csit,
)
from .errors import InsufficientSamples, ThetaZero, Unstable
from .fading import FadingModel

_CHUNK = 1 << 20
_MIN_TAIL_SAMPLES = 100


@dataclass(frozen=True)
class SimConfig:
    """Queue simulation setup.

    arrival_rate is in bits/s; q_thresholds are queue depths in bits whose
    exceedance probabilities are measured.  warmup_frames (default 1% of
    frames) are simulated but excluded from the statistics so the fit sees
    a queue that has forgotten its empty start.
    """

    model: FadingModel
    snr: float
    qos: QosConfig
    mode: str
    arrival_rate: float
    frames: int
    seed: int
    q_thresholds: tuple
    warmup_frames: int | None = None

    def __post_init__(self):
        if self.mode not in ("csir", "csit"):
            raise ValueError(f"mode must be 'csir' or 'csit', got {self.mode!r}")
        if not (self.snr > 0 and math.isfinite(self.snr)):
            raise ValueError(f"snr must be positive, got {self.snr}")
        if not (self.arrival_rate > 0 and math.isfinite(self.arrival_rate)):
            raise ValueError(
                f"arrival_rate must be positive, got {self.arrival_rate}"
            )
        if int(self.frames) < 1:
            raise ValueError(f"frames must be >= 1, got {self.frames}")
        object.__setattr__(self, "frames", int(self.frames))
        warm = self.warmup_frames
        warm = self.frames // 100 if warm is None else int(warm)
        if not 0 <= warm < self.frames:
            raise ValueError(
                f"warmup_frames must lie in [0, frames), got {warm} "
                f"with frames={self.frames}"
            )
        object.__setattr__(self, "warmup_frames", warm)
        th = tuple(float(q) for q in self.q_thresholds)
        if not th:
            raise ValueError("q_thresholds must not be empty")
        if any(q <= 0 or not math.isfinite(q) for q in th):
            raise ValueError("q_thresholds must be positive and finite")
        if any(b <= a for a, b in zip(th, th[1:])):
            raise ValueError("q_thresholds must be strictly increasing")
        object.__setattr__(self, "q_thresholds", th)


@dataclass(frozen=True)
class TailEstimate:
    """Measured exceedance curve and its fitted exponential decay.

    fitted_decay is the slope of -ln P(Q > q) against q; fit_rsquared
    reports how exponential the measured tail actually is.  A queue that
    never reached the smallest threshold is reported with -inf log
    probabilities, infinite decay, and zero samples.
    """

    thresholds: tuple
    log_tail_probs: tuple
    fitted_decay: float
    fit_rsquared: float
    samples_at_largest_threshold: int


def simulate_queue(config: SimConfig) -> TailEstimate:
    """Run the Lindley recursion and fit the exceedance tail.

    Raises Unstable when the arrival rate is at or above the ergodic
    capacity (no stationary tail exists) and InsufficientSamples when the
    largest threshold was crossed fewer than 100 times after warmup.
    """
    model, qos = config.model, config.qos
    capacity = qos.B * shannon_limit(config.snr, config.mode, qos, model)
    if config.arrival_rate >= capacity:
        raise Unstable(
            f"arrival rate {config.arrival_rate:g} bits/s is not below the "
            f"ergodic capacity {capacity:g} bits/s; the queue has no "
            "stationary distribution"
        )
    policy = None
    if config.mode == "csit":
        policy = solve_alpha(config.snr, qos, model)
    rng = np.random.default_rng(config.seed)
    thresholds = np.asarray(config.q_thresholds)
    counts = np.zeros(len(thresholds), dtype=np.int64)
    q_tail = 0.0
    done = 0
    warm = config.warmup_frames
    while done < config.frames:
        n = min(_CHUNK, config.frames - done)
        z = model.sample(rng, n)
        if config.mode == "csir":
            rates = service_rate_csir(config.snr, z, qos)
        else:
            rates = service_rate_csit(policy, z, qos)
        x = config.arrival_rate * qos.T - rates * qos.T
        s = np.cumsum(x)
        # Q_j = max(Q_0 + S_j, S_j - min_{k<=j} S_k) for the block, which
        # matches iterating Lindley when the queue never empties before the
        # running minimum takes over.
        q = s + np.maximum(q_tail, -np.minimum.accumulate(s))
        q = np.maximum(q, 0.0)
        q_tail = float(q[-1])
        lo = warm - done
        if lo < n:
            post = q[max(lo, 0):]
            for i, thr in enumerate(thresholds):
                counts[i] += int(np.count_nonzero(post > thr))
        done += n
    n_post = config.frames - warm
    if counts[0] == 0:
        return TailEstimate(
            thresholds=config.q_thresholds,
            log_tail_probs=tuple(-math.inf for _ in thresholds),
            fitted_decay=math.inf,
            fit_rsquared=1.0,
            samples_at_largest_threshold=0,
        )
    if counts[-1] < _MIN_TAIL_SAMPLES:
        raise InsufficientSamples(
            f"largest threshold q={thresholds[-1]:g} was crossed only "
            f"{int(counts[-1])} times (< {_MIN_TAIL_SAMPLES}); lower the "
            "thresholds or simulate more frames"
        )
    log_p = np.log(counts / n_post)
    slope, intercept = np.polyfit(thresholds, log_p, 1)
    pred = slope * thresholds + intercept
    ss_res = float(np.sum((log_p - pred) ** 2))
    ss_tot = float(np.sum((log_p - log_p.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    return TailEstimate(
        thresholds=config.q_thresholds,
        log_tail_probs=tuple(float(v) for v in log_p),
        fitted_decay=float(-slope),
        fit_rsquared=r2,
        samples_at_largest_threshold=int(counts[-1]),
    )


def effective_capacity_from_rates(rates, theta: float, T: float) -> float:
    """-(1/(theta T)) ln mean(exp(-theta T r)) over sampled service rates."""
    if theta <= 0:
        raise ThetaZero("empirical effective capacity needs theta > 0")
    r = np.asarray(rates, dtype=float)
    y = -theta * T * r
    m = float(y.max())
    log_mean = m + math.log(float(np.exp(y - m).sum()) / r.size)
    return -log_mean / (theta * T)


def effective_capacity_empirical(
    model: FadingModel,
    snr: float,
    qos: QosConfig,
    mode: str,
    frames: int,
    seed: int,
) -> float:
    """Monte Carlo effective capacity in bits/s from simulated service rates.

    Log-domain averaging in chunks, so millions of frames cost memory for
    one chunk only and extreme exponents cannot overflow.
    """
    if mode not in ("csir", "csit"):
        raise ValueError(f"mode must be 'csir' or 'csit', got {mode!r}")
    if qos.theta == 0:
        raise ThetaZero("empirical effective capacity needs theta > 0")
    frames = int(frames)
    if frames < 1:
        raise ValueError(f"frames must be >= 1, got {frames}")
    policy = None
    if mode == "csit":
        policy = solve_alpha(snr, qos, model)
    rng = np.random.default_rng(seed)
    pieces = []
    done = 0
    while done < frames:
        n = min(_CHUNK, frames - done)
        z = model.sample(rng, n)
        if mode == "csir":
            rates = service_rate_csir(snr, z, qos)
        else:
            rates = service_rate_csit(policy, z, qos)
        y = -qos.theta * qos.T * rates
        m = float(y.max())
        pieces.append((m, float(np.exp(y - m).sum())))
        done += n
    m_all = max(m for m, _ in pieces)
    total = sum(s * math.exp(m - m_all) for m, s in pieces)
    log_mean = m_all + math.log(total / frames)
    return -log_mean / (qos.theta * qos.T)


def predicted_effective_capacity(
    model: FadingModel, snr: float, qos: QosConfig, mode: str
) -> float:
    """Quadrature effective capacity in bits/s, for comparison with the fit."""
    if mode == "csir":
        se = spectral_efficiency_csir(snr, qos, model)
    elif mode == "csit":
        se = spectral_efficiency_csit(snr, qos, model)
    else:
        raise ValueError(f"mode must be 'csir' or 'csit', got {mode!r}")
    return qos.B * se
