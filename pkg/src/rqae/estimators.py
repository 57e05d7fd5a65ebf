"""Amplitude estimation algorithms.

Each algorithm has a batched simulator (``simulate_*``) that runs many
independent trials at once, one random stream per trial, and a single-run
wrapper (``run_*``) built on it. The estimator classes expose the same
algorithms through the scikit-learn parameter protocol.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator

from ._validation import check_amplitudes, check_int
from .errors import ConfigurationError
from .likelihood import (
    DEFAULT_POSTERIOR_GRID,
    BinomialLikelihood,
    EstimationOutcome,
    mle_batch,
    posterior,
    posterior_batch,
)
from .sampling import AmplitudeModel, Record, Schedule, hit_probability, measure_r
from .schedules import schedule_djqae, schedule_eis, schedule_from_depths, schedule_lis


@dataclass
class TrialBatch:
    """Per-trial results of a batched simulation.

    ``shots``/``hits`` are ``(n_trials, n_columns)`` counts over ``depths``;
    ``crlb`` is each trial's unbiased bound (0 at ``a`` in {0, 1}).
    """

    amplitudes: np.ndarray
    estimates: np.ndarray
    costs: np.ndarray
    crlb: np.ndarray
    depths: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    shots: np.ndarray | None = None
    hits: np.ndarray | None = None
    entry_hits: np.ndarray | None = None

    def __len__(self):
        return len(self.estimates)

    def records(self, i):
        if self.shots is None:
            return ()
        return tuple(
            Record(int(m), int(r), int(h))
            for m, r, h in zip(self.depths, self.shots[i], self.hits[i])
            if r > 0
        )


@dataclass(frozen=True)
class RandomRule:
    """How RQAE weights the depths of each iteration."""

    kind: str = "uniform"
    grid_size: int = DEFAULT_POSTERIOR_GRID

    def __post_init__(self):
        if self.kind not in ("uniform", "adaptive"):
            raise ConfigurationError(f"rule must be 'uniform' or 'adaptive', got {self.kind!r}")
        check_int(self.grid_size, "grid_size", min_val=2)


def _as_rule(rule):
    return rule if isinstance(rule, RandomRule) else RandomRule(str(rule))


def _bound(amplitudes, weight):
    """``sqrt(a (1 - a) / sum R M^2)`` with the limit 0 at the boundary."""
    a = np.asarray(amplitudes, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.sqrt(a * (1.0 - a) / weight)
    return np.where((a > 0.0) & (a < 1.0), out, 0.0)


def _batch_from_counts(amplitudes, depths, shots, hits):
    depths = np.asarray(depths, dtype=np.int64)
    estimates = mle_batch(depths, shots, hits)
    costs = shots @ depths
    return TrialBatch(
        amplitudes=amplitudes,
        estimates=estimates,
        costs=costs,
        crlb=_bound(amplitudes, shots @ depths**2),
        depths=depths,
        shots=shots,
        hits=hits,
    )


def simulate_mlae(schedule: Schedule, amplitudes, rngs):
    """Run MLAE with a fixed schedule once per ``(amplitude, rng)`` pair."""
    amplitudes = check_amplitudes(amplitudes)
    if len(schedule) == 0:
        raise ConfigurationError("MLAE needs a non-empty schedule")
    entry_depths, entry_shots = schedule.depths, schedule.shots
    depths, column = np.unique(entry_depths, return_inverse=True)
    T = len(amplitudes)
    shots = np.zeros((T, len(depths)), dtype=np.int64)
    hits = np.zeros((T, len(depths)), dtype=np.int64)
    np.add.at(shots, (slice(None), column), entry_shots)
    probs = hit_probability(entry_depths[None, :], amplitudes[:, None])
    entry_hits = np.zeros((T, len(entry_depths)), dtype=np.int64)
    for t, rng in enumerate(rngs):
        entry_hits[t] = rng.binomial(entry_shots, probs[t])
        np.add.at(hits[t], column, entry_hits[t])
    batch = _batch_from_counts(amplitudes, depths, shots, hits)
    batch.entry_hits = entry_hits
    return batch


def simulate_mc(R, amplitudes, rngs):
    """Classical sampling: ``a_hat = h / R`` at depth one."""
    R = check_int(R, "R", min_val=1)
    amplitudes = check_amplitudes(amplitudes)
    hits = np.array([measure_r(1, R, AmplitudeModel(a), rng) for a, rng in zip(amplitudes, rngs)], dtype=np.int64)
    T = len(amplitudes)
    return TrialBatch(
        amplitudes=amplitudes,
        estimates=hits / R,
        costs=np.full(T, R, dtype=np.int64),
        crlb=_bound(amplitudes, float(R)),
        depths=np.array([1], dtype=np.int64),
        shots=np.full((T, 1), R, dtype=np.int64),
        hits=hits[:, None],
    )


def iteration_depths(i):
    """Depth range ``2^(i-1) .. 2^i - 1`` sampled in RQAE iteration ``i``."""
    return np.arange(2 ** (i - 1), 2**i, dtype=np.int64)


def _score_table(depths, angles):
    return np.sin(2.0 * np.outer(depths, angles)) ** 2


def adaptive_weights_batch(depths_seen, shots, hits, candidates, G=DEFAULT_POSTERIOR_GRID):
    """Posterior-expected score of each candidate depth, one row per record set."""
    family = BinomialLikelihood(depths_seen, shots, hits)
    angles, dens = posterior_batch(family, G)
    return dens @ _score_table(np.asarray(candidates), angles).T


def adaptive_weights(records, depths, G=DEFAULT_POSTERIOR_GRID):
    """Expected score ``E[s(M; a_hat)]`` under the posterior of ``records``.

    Falls back to equal weights when every expectation vanishes.
    """
    depths = np.asarray(depths, dtype=np.int64)
    if depths.size == 0:
        raise ValueError("depths must be non-empty")
    post = posterior(records, G)
    w = _score_table(depths, post.angles) @ post.density
    if not np.all(np.isfinite(w)) or w.sum() <= 0.0:
        return np.ones(len(depths))
    return w


def _normalize_rows(w):
    w = np.where(np.isfinite(w) & (w > 0.0), w, 0.0)
    total = w.sum(axis=1, keepdims=True)
    flat = total[:, 0] <= 0.0
    if np.any(flat):
        w[flat] = 1.0
        total[flat] = w.shape[1]
    return w / total


def simulate_rqae(K, R, rule, amplitudes, rngs):
    """Random-depth amplitude estimation, one trial per ``(amplitude, rng)``.

    Iteration 1 measures depth 1 ``R`` times. Iteration ``i`` draws ``R``
    depths from ``2^(i-1) .. 2^i - 1`` with probability proportional to the
    rule's weights (computed from the records of iterations ``1..i-1``) and
    measures each realized depth as many times as it was drawn.
    """
    K = check_int(K, "K", min_val=1)
    R = check_int(R, "R", min_val=1)
    rule = _as_rule(rule)
    amplitudes = check_amplitudes(amplitudes)
    rngs = list(rngs)
    T = len(amplitudes)
    D = 2**K - 1
    depths = np.arange(1, D + 1, dtype=np.int64)
    shots = np.zeros((T, D), dtype=np.int64)
    hits = np.zeros((T, D), dtype=np.int64)
    probs = hit_probability(depths[None, :], amplitudes[:, None])

    shots[:, 0] = R
    for t, rng in enumerate(rngs):
        hits[t, 0] = rng.binomial(R, probs[t, 0])

    for i in range(2, K + 1):
        cand = iteration_depths(i)
        lo = cand[0] - 1
        n = len(cand)
        if rule.kind == "uniform":
            p = np.full((T, n), 1.0 / n)
        else:
            seen = slice(0, lo)
            w = adaptive_weights_batch(depths[seen], shots[:, seen], hits[:, seen], cand, rule.grid_size)
            p = _normalize_rows(w)
        for t, rng in enumerate(rngs):
            draws = rng.choice(n, size=R, p=p[t])
            counts = np.bincount(draws, minlength=n)
            shots[t, lo : lo + n] = counts
            hits[t, lo : lo + n] = rng.binomial(counts, probs[t, lo : lo + n])

    return _batch_from_counts(amplitudes, depths, shots, hits)


def _single(batch, i=0):
    return EstimationOutcome(
        estimate=float(batch.estimates[i]),
        records=batch.records(i),
        cost=int(batch.costs[i]),
    )


def run_mlae(schedule, model, rng):
    batch = simulate_mlae(schedule, [model.a], [rng])
    records = tuple(Record(m, r, int(h)) for (m, r), h in zip(schedule, batch.entry_hits[0]))
    return EstimationOutcome(estimate=float(batch.estimates[0]), records=records, cost=int(batch.costs[0]))


def run_mc(R, model, rng):
    return _single(simulate_mc(R, [model.a], [rng]))


def run_rqae(K, R, rule, model, rng):
    return _single(simulate_rqae(K, R, rule, [model.a], [rng]))


def _as_model(oracle):
    return oracle if isinstance(oracle, AmplitudeModel) else AmplitudeModel(float(oracle))


def _as_generator(random_state):
    if isinstance(random_state, np.random.Generator):
        return random_state
    return np.random.default_rng(random_state)


class _AmplitudeEstimatorBase(BaseEstimator):
    """Shared ``fit`` for estimators whose data source is an amplitude oracle."""

    def fit(self, oracle, y=None):
        """Run the algorithm against ``oracle`` (an ``AmplitudeModel`` or ``a``).

        Sets ``estimate_``, ``records_``, ``cost_`` and ``outcome_``.
        """
        model = _as_model(oracle)
        batch = self.simulate([model.a], [_as_generator(self.random_state)])
        self.outcome_ = _single(batch)
        self.estimate_ = self.outcome_.estimate
        self.records_ = self.outcome_.records
        self.cost_ = self.outcome_.cost
        return self

    def simulate(self, amplitudes, rngs):
        raise NotImplementedError

    def config_name(self):
        """Canonical name used to derive per-trial seeds."""
        params = self.get_params()
        params.pop("random_state", None)
        body = ",".join(f"{k}={params[k]}" for k in sorted(params))
        return f"{type(self).__name__}({body})"


class MonteCarloEstimator(_AmplitudeEstimatorBase):
    def __init__(self, shots=32, random_state=None):
        self.shots = shots
        self.random_state = random_state

    def simulate(self, amplitudes, rngs):
        return simulate_mc(self.shots, amplitudes, rngs)


class MLAE(_AmplitudeEstimatorBase):
    """Maximum-likelihood amplitude estimation with a fixed depth schedule.

    ``schedule`` is ``"eis"``, ``"lis"``, ``"djqae"`` (depth-jittered EIS) or an
    explicit sequence of depths, each measured ``shots`` times.
    """

    def __init__(self, schedule="eis", n_iterations=5, shots=32, random_state=None):
        self.schedule = schedule
        self.n_iterations = n_iterations
        self.shots = shots
        self.random_state = random_state

    def build_schedule(self):
        if isinstance(self.schedule, str):
            makers = {"eis": schedule_eis, "lis": schedule_lis, "djqae": schedule_djqae}
            if self.schedule not in makers:
                raise ConfigurationError(f"unknown schedule {self.schedule!r}")
            return makers[self.schedule](self.n_iterations, self.shots)
        return schedule_from_depths(self.schedule, self.shots)

    def simulate(self, amplitudes, rngs):
        return simulate_mlae(self.build_schedule(), amplitudes, rngs)


class RQAE(_AmplitudeEstimatorBase):
    """Random-depth amplitude estimation with the uniform or adaptive rule."""

    def __init__(self, n_iterations=5, shots=32, rule="adaptive", grid_size=DEFAULT_POSTERIOR_GRID, random_state=None):
        self.n_iterations = n_iterations
        self.shots = shots
        self.rule = rule
        self.grid_size = grid_size
        self.random_state = random_state

    def simulate(self, amplitudes, rngs):
        rule = RandomRule(self.rule, self.grid_size)
        return simulate_rqae(self.n_iterations, self.shots, rule, amplitudes, rngs)
