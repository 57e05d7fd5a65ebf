"""Experiment driver: bias/RMSE sweeps, cost-vs-error comparisons, depth histograms.

Trials are split into fixed-size chunks that may run on a thread pool; each
trial draws from its own stream derived from ``(seed, configuration, trial)``
and results are folded in trial order, so output does not depend on the
number of workers.
"""

from __future__ import annotations

import csv
import dataclasses
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigurationError
from .estimators import MLAE, RQAE, MonteCarloEstimator, iteration_depths
from .likelihood import DEFAULT_POSTERIOR_GRID
from .qpe import QPEEstimator
from .sampling import trial_rngs

CHUNK = 256
ALGORITHMS = ("mc", "mlae-lis", "mlae-eis", "mlae", "djqae", "rqae-u", "rqae-a", "qpe")


@dataclass(frozen=True)
class AlgorithmSpec:
    """One algorithm configuration.

    ``K`` is the iteration count, ``R`` the shots per depth (MC: total shots;
    QPE: repetitions) and ``t`` the QPE register size. ``depths`` is only used
    by ``mlae`` (explicit depth list).
    """

    name: str
    K: int = 5
    R: int = 32
    t: int = 5
    grid_size: int = DEFAULT_POSTERIOR_GRID
    depths: tuple = ()

    def __post_init__(self):
        if self.name not in ALGORITHMS:
            raise ConfigurationError(f"unknown algorithm {self.name!r}; choose from {', '.join(ALGORITHMS)}")
        if self.name == "mlae" and not self.depths:
            raise ConfigurationError("algorithm 'mlae' needs an explicit depth list")
        for label, value in (("K", self.K), ("R", self.R), ("t", self.t), ("grid_size", self.grid_size)):
            if int(value) != value or value < 1:
                raise ConfigurationError(f"{label} must be a positive integer, got {value!r}")

    @property
    def canonical(self):
        if self.name == "mc":
            return f"mc:R={self.R}"
        if self.name == "qpe":
            return f"qpe:t={self.t}:R={self.R}"
        if self.name == "mlae":
            return f"mlae:depths={'-'.join(map(str, self.depths))}:R={self.R}"
        if self.name == "rqae-a":
            return f"rqae-a:K={self.K}:R={self.R}:G={self.grid_size}"
        return f"{self.name}:K={self.K}:R={self.R}"

    @property
    def knob(self):
        """Value of the parameter varied in comparisons."""
        return {"mc": self.R, "qpe": self.t}.get(self.name, self.K)

    def estimator(self):
        if self.name == "mc":
            return MonteCarloEstimator(shots=self.R)
        if self.name == "qpe":
            return QPEEstimator(n_control=self.t, repetitions=self.R)
        if self.name in ("rqae-u", "rqae-a"):
            rule = "uniform" if self.name == "rqae-u" else "adaptive"
            return RQAE(n_iterations=self.K, shots=self.R, rule=rule, grid_size=self.grid_size)
        schedule = {"mlae-lis": "lis", "mlae-eis": "eis", "djqae": "djqae"}.get(self.name, list(self.depths))
        return MLAE(schedule=schedule, n_iterations=self.K, shots=self.R)


@dataclass(frozen=True)
class SweepRow:
    a: float
    bias: float
    rmse: float
    crlb: float
    trials: int

    @property
    def bias_stderr(self):
        """Standard error of ``bias`` as a trial mean."""
        if self.trials < 2:
            return math.inf
        var = max(0.0, self.rmse**2 - self.bias**2) * self.trials / (self.trials - 1)
        return math.sqrt(var / self.trials)


@dataclass(frozen=True)
class CompareRow:
    algorithm: str
    parameter: int
    mean_cost: float
    rmse: float


@dataclass(frozen=True)
class DepthHistogramRow:
    depth: int
    mean_shots: float


@dataclass(frozen=True)
class VerifyRow:
    phi: float
    max_deviation: float


@dataclass
class TrialResults:
    estimates: np.ndarray
    costs: np.ndarray
    crlb: np.ndarray
    shots: np.ndarray | None


def run_trials(spec: AlgorithmSpec, amplitudes, seed, config=None, workers=1):
    """Run ``spec`` once per amplitude; trial ``i`` uses stream ``(seed, config, i)``."""
    amplitudes = np.asarray(amplitudes, dtype=float)
    config = spec.canonical if config is None else config
    est = spec.estimator()
    starts = list(range(0, len(amplitudes), CHUNK))

    def chunk(start):
        idx = range(start, min(len(amplitudes), start + CHUNK))
        return est.simulate(amplitudes[idx.start : idx.stop], trial_rngs(seed, config, idx))

    if workers > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            batches = list(pool.map(chunk, starts))
    else:
        batches = [chunk(s) for s in starts]
    if not batches:
        empty = np.zeros(0)
        return TrialResults(empty, empty, empty, None)
    shots = None
    if spec.name not in ("qpe",) and all(b.shots is not None for b in batches):
        shots = np.concatenate([b.shots for b in batches])
    return TrialResults(
        estimates=np.concatenate([b.estimates for b in batches]),
        costs=np.concatenate([b.costs for b in batches]),
        crlb=np.concatenate([b.crlb for b in batches]),
        shots=shots,
    )


def default_a_grid(n=256):
    """``n`` evenly spaced points on ``[1/(n+1), n/(n+1)]``."""
    return [(i + 1) / (n + 1) for i in range(n)]


def sweep(spec: AlgorithmSpec, a_grid, trials, seed=0, workers=1):
    """Bias, RMSE and mean CRLB of ``spec`` at each ground truth, sorted by ``a``."""
    if trials < 1:
        raise ConfigurationError("trials must be >= 1")
    a_grid = sorted(float(a) for a in a_grid)
    if not a_grid:
        raise ConfigurationError("a-grid must be non-empty")
    rows = []
    for a in a_grid:
        res = run_trials(spec, np.full(trials, a), seed, config=f"{spec.canonical}@a={a!r}", workers=workers)
        err = res.estimates - a
        rows.append(
            SweepRow(
                a=a,
                bias=float(np.mean(err)),
                rmse=float(np.sqrt(np.mean(err**2))),
                crlb=float(np.mean(res.crlb)),
                trials=trials,
            )
        )
    return rows


def ground_truths(samples, seed):
    """Uniform draws on ``[0, 1]`` shared by every configuration of a comparison."""
    return trial_rngs(seed, "compare:ground-truth", [0])[0].uniform(0.0, 1.0, size=samples)


def default_compare_specs(algorithms=("mc", "mlae-eis", "djqae", "rqae-u", "rqae-a", "qpe"), k_max=8, t_max=8, mc_max_exp=12):
    """MC at R = 2^4..2^mc_max_exp; MLAE/DJQAE with R=32, RQAE with R=16, QPE with R=4."""
    specs = []
    for name in algorithms:
        if name == "mc":
            specs += [AlgorithmSpec("mc", R=2**e) for e in range(4, mc_max_exp + 1)]
        elif name in ("mlae-eis", "mlae-lis"):
            specs += [AlgorithmSpec(name, K=k, R=32) for k in range(1, k_max + 1)]
        elif name == "djqae":
            specs += [AlgorithmSpec(name, K=k, R=32) for k in range(2, k_max + 1)]
        elif name in ("rqae-u", "rqae-a"):
            specs += [AlgorithmSpec(name, K=k, R=16) for k in range(1, k_max + 1)]
        elif name == "qpe":
            specs += [AlgorithmSpec("qpe", t=t, R=4) for t in range(2, t_max + 1)]
        else:
            raise ConfigurationError(f"algorithm {name!r} is not available in comparisons")
    return specs


def compare(specs, samples, seed=0, workers=1):
    """RMSE against mean oracle cost for each configuration over uniform ground truths."""
    if samples < 1:
        raise ConfigurationError("samples must be >= 1")
    truths = ground_truths(samples, seed)
    rows = []
    for spec in specs:
        res = run_trials(spec, truths, seed, workers=workers)
        rows.append(
            CompareRow(
                algorithm=spec.name,
                parameter=int(spec.knob),
                mean_cost=float(np.mean(res.costs)),
                rmse=float(np.sqrt(np.mean((res.estimates - truths) ** 2))),
            )
        )
    return rows


def depth_stats(rule, K, R, a, trials, seed=0, grid_size=DEFAULT_POSTERIOR_GRID, workers=1):
    """Mean realized shots per depth of RQAE over ``trials`` runs at ground truth ``a``."""
    if trials < 1:
        raise ConfigurationError("trials must be >= 1")
    name = {"uniform": "rqae-u", "adaptive": "rqae-a"}.get(rule)
    if name is None:
        raise ConfigurationError(f"rule must be 'uniform' or 'adaptive', got {rule!r}")
    spec = AlgorithmSpec(name, K=K, R=R, grid_size=grid_size)
    res = run_trials(spec, np.full(trials, float(a)), seed, config=f"{spec.canonical}@a={float(a)!r}", workers=workers)
    mean = res.shots.mean(axis=0)
    return [DepthHistogramRow(depth=int(m), mean_shots=float(s)) for m, s in zip(range(1, len(mean) + 1), mean)]


def iteration_of(depth):
    """RQAE iteration whose depth range contains ``depth``."""
    return int(depth).bit_length()


def _format(value):
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def emit_csv(rows, destination, row_type=None):
    """Write dataclass rows as CSV: header plus one line per row, LF endings."""
    rows = list(rows)
    if row_type is None:
        if not rows:
            raise ValueError("row_type is required to write a header for an empty row list")
        row_type = type(rows[0])
    if any(type(r) is not row_type for r in rows):
        raise ValueError("rows must all be of the same type")
    names = [f.name for f in dataclasses.fields(row_type)]
    path = Path(destination)
    try:
        with path.open("w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(names)
            for r in rows:
                writer.writerow([_format(getattr(r, n)) for n in names])
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc}") from exc
    return path


def read_csv(source, row_type):
    """Parse a file written by :func:`emit_csv` back into ``row_type`` rows."""
    casts = {"int": int, "float": float, "str": str}
    fields = dataclasses.fields(row_type)
    with Path(source).open(encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        return [row_type(**{f.name: casts[str(f.type)](rec[f.name]) for f in fields}) for rec in reader]
