"""Phase-estimation baseline: outcome distribution, sampling and MLE."""

from __future__ import annotations

import math

import numpy as np

from ._validation import check_amplitudes, check_int
from .estimators import TrialBatch, _AmplitudeEstimatorBase
from .likelihood import EstimationOutcome, maximize

_FISHER_STEP = 1e-6


def _fejer(t, delta):
    """``sin^2(2^t pi delta) / (2^(2t) sin^2(pi delta))``, equal to 1 at integer ``delta``."""
    n = 2**t
    delta = np.asarray(delta, dtype=float)
    den = n * np.sin(np.pi * delta)
    num = np.sin(n * np.pi * delta)
    exact = np.abs(den) < 1e-300
    with np.errstate(divide="ignore", invalid="ignore"):
        out = (num / np.where(exact, 1.0, den)) ** 2
    return np.where(exact, 1.0, out)


_LOG_SINC_SERIES = (-1 / 6, -1 / 180, -1 / 2835, -1 / 37800, -1 / 467775)


def _log_sinc(u):
    """``ln|sin(u) / u|``, by its Taylor series near zero where the direct form cancels."""
    u = np.asarray(u, dtype=float)
    small = np.abs(u) < 0.05
    u2 = np.where(small, u, 0.0) ** 2
    series = np.zeros_like(u2)
    for c in reversed(_LOG_SINC_SERIES):
        series = (series + c) * u2
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = np.log(np.abs(np.sin(u) / np.where(small, 1.0, u)))
    return np.where(small, series, direct)


def _log_fejer(t, delta):
    """``ln`` of the kernel, accurate to full relative precision near its peaks."""
    delta = np.asarray(delta, dtype=float)
    u = np.pi * (delta - np.round(delta))
    return 2.0 * (_log_sinc(2**t * u) - _log_sinc(u))


def outcome_probabilities(t, phis):
    """``Pr(y | phi)`` for every outcome ``y``; shape ``phis.shape + (2^t,)``."""
    n = 2**t
    y = np.arange(n) / n
    theta = np.asarray(phis, dtype=float)[..., None] / np.pi
    return 0.5 * _fejer(t, theta - y) + 0.5 * _fejer(t, -theta - y)


def qpe_outcome_distribution(t, model):
    """Distribution of the ``t``-bit phase register for the Grover eigenphases ``+-phi/pi``."""
    t = check_int(t, "t", min_val=1)
    p = outcome_probabilities(t, model.phi)
    return p / p.sum()


class OutcomeLikelihood:
    """Log-likelihood of phase-register outcome counts, rows of ``counts``."""

    def __init__(self, t, counts):
        self.t = t
        self.counts = np.atleast_2d(np.asarray(counts, dtype=float))

    def __len__(self):
        return self.counts.shape[0]

    @property
    def max_frequency(self):
        return 2**self.t

    def take(self, rows):
        return OutcomeLikelihood(self.t, self.counts[rows])

    def _log_table(self, phis):
        with np.errstate(divide="ignore"):
            return np.log(outcome_probabilities(self.t, phis))

    def grid(self, phis):
        table = np.maximum(self._log_table(phis), -1e250)
        return self.counts @ table.T

    def at(self, x):
        logp = self._log_table(x)
        c = self.counts[:, None, :]
        with np.errstate(invalid="ignore"):
            terms = np.where(c == 0, 0.0, c * logp)
        return terms.sum(axis=-1)

    def diff(self, x, y):
        """``at(x) - at(y)`` through kernel log-ratios, free of cancellation at the peak."""
        n = 2**self.t
        ys = np.arange(n) / n
        theta_x = np.asarray(x, dtype=float)[..., None] / np.pi
        theta_y = np.asarray(y, dtype=float)[..., None] / np.pi
        with np.errstate(divide="ignore", invalid="ignore"):
            num = 0.0
            den = 0.0
            for sign in (1.0, -1.0):
                log_fy = _log_fejer(self.t, sign * theta_y - ys)
                log_fx = _log_fejer(self.t, sign * theta_x - ys)
                f_y = np.exp(log_fy)
                num = num + f_y * np.expm1(log_fx - log_fy)
                den = den + f_y
            ratio = num / den
            c = self.counts[:, None, :]
            terms = np.where(c == 0, 0.0, c * np.log1p(ratio))
            out = terms.sum(axis=-1)
        bad = ~np.isfinite(out)
        if np.any(bad):
            with np.errstate(invalid="ignore"):
                direct = self.at(x) - self.at(y)
            out = np.where(bad, np.nan_to_num(direct, nan=0.0), out)
        return out


def qpe_fisher_information(t, a, R=1):
    """Fisher information about ``a`` of ``R`` phase-estimation runs."""
    phi = math.asin(math.sqrt(a))
    lo, hi = max(phi - _FISHER_STEP, 0.0), min(phi + _FISHER_STEP, math.pi / 2)
    p = outcome_probabilities(t, phi)
    dp = (outcome_probabilities(t, hi) - outcome_probabilities(t, lo)) / (hi - lo)
    keep = p > 1e-300
    info_phi = float(np.sum(dp[keep] ** 2 / p[keep]))
    return R * info_phi / math.sin(2 * phi) ** 2


def simulate_qpe(t, R, amplitudes, rngs):
    """Sample ``R`` phase-register readouts per trial and maximize their likelihood."""
    t = check_int(t, "t", min_val=1)
    R = check_int(R, "R", min_val=1)
    amplitudes = check_amplitudes(amplitudes)
    n = 2**t
    phis = np.arcsin(np.sqrt(amplitudes))
    dist = outcome_probabilities(t, phis)
    dist /= dist.sum(axis=1, keepdims=True)
    counts = np.zeros((len(amplitudes), n), dtype=np.int64)
    for i, rng in enumerate(rngs):
        counts[i] = np.bincount(rng.choice(n, size=R, p=dist[i]), minlength=n)
    phi_hat, _ = maximize(OutcomeLikelihood(t, counts))
    crlb = np.zeros(len(amplitudes))
    for i, a in enumerate(amplitudes):
        if 0.0 < a < 1.0:
            crlb[i] = 1.0 / math.sqrt(qpe_fisher_information(t, a, R))
    return TrialBatch(
        amplitudes=amplitudes,
        estimates=np.sin(phi_hat) ** 2,
        costs=np.full(len(amplitudes), R * (n - 1), dtype=np.int64),
        crlb=crlb,
        depths=np.arange(n, dtype=np.int64),
        hits=counts,
    )


def run_qpe(t, R, model, rng):
    batch = simulate_qpe(t, R, [model.a], [rng])
    return EstimationOutcome(
        estimate=float(batch.estimates[0]),
        cost=int(batch.costs[0]),
        outcomes=tuple(int(c) for c in batch.hits[0]),
    )


class QPEEstimator(_AmplitudeEstimatorBase):
    """Phase estimation with ``n_control`` register qubits, repeated ``repetitions`` times."""

    def __init__(self, n_control=5, repetitions=4, random_state=None):
        self.n_control = n_control
        self.repetitions = repetitions
        self.random_state = random_state

    def simulate(self, amplitudes, rngs):
        return simulate_qpe(self.n_control, self.repetitions, amplitudes, rngs)
