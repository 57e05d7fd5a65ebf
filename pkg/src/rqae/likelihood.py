"""Likelihood, maximum-likelihood estimation, Fisher information and posterior.

The maximizer works on batches: every row of a count matrix is an independent
record set, and all rows share the same depth columns. A dense scan over
``[0, pi/2]`` is followed by golden-section refinement of the best few local
maxima of the scan.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._validation import check_amplitude, check_int
from .errors import DomainError, NoDataError
from .sampling import Record, Schedule, oracle_cost

HALF_PI = math.pi / 2
MAX_SCAN_POINTS = 2**17
MIN_SCAN_POINTS = 2**12
SCAN_POINTS_PER_DEPTH = 16
N_CANDIDATES = 3
PHI_TOL = 1e-12
DEFAULT_POSTERIOR_GRID = 4096

# stands in for log(0) inside matrix products; 0 * floor stays 0
_LOG_FLOOR = -1e250
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class EstimationOutcome:
    """Final estimate of one run together with what it cost."""

    estimate: float
    records: tuple = ()
    cost: int = 0
    outcomes: tuple | None = None


def scan_points(max_frequency):
    """Scan density for a likelihood whose sharpest factor is ``sin^2(max_frequency * phi)``."""
    return int(min(MAX_SCAN_POINTS, max(MIN_SCAN_POINTS, SCAN_POINTS_PER_DEPTH * int(max_frequency))))


def _xlog_sq(count, x):
    """``count * ln(x^2)``, with ``0 * ln 0 = 0`` and ``-inf`` for impossible counts."""
    with np.errstate(divide="ignore", invalid="ignore"):
        out = count * np.log(x * x)
    return np.where(count == 0, 0.0, out)


def log_likelihood(records, phi):
    """``sum_k h_k ln sin^2(M_k phi) + (R_k - h_k) ln cos^2(M_k phi)``.

    Returns ``-inf`` when an observed outcome is impossible at ``phi``.
    """
    total = 0.0
    for rec in records:
        x = rec.depth * phi
        total += float(_xlog_sq(rec.hits, math.sin(x)) + _xlog_sq(rec.shots - rec.hits, math.cos(x)))
    return total


class BinomialLikelihood:
    """Log-likelihood of hit counts over a shared set of depth columns.

    ``shots`` and ``hits`` are ``(n_rows, n_depths)`` integer arrays.
    """

    def __init__(self, depths, shots, hits):
        self.depths = np.asarray(depths, dtype=float)
        self.shots = np.atleast_2d(np.asarray(shots, dtype=float))
        self.hits = np.atleast_2d(np.asarray(hits, dtype=float))
        self.misses = self.shots - self.hits

    def __len__(self):
        return self.shots.shape[0]

    @property
    def max_frequency(self):
        used = self.depths[np.any(self.shots > 0, axis=0)]
        return int(used.max()) if used.size else 1

    def symmetry_order(self):
        """Per row, the gcd ``d`` of the measured depths.

        The likelihood is invariant under ``phi -> phi + pi/d`` and ``phi -> -phi``.
        """
        used = np.where(self.shots > 0, self.depths.astype(np.int64), 0)
        d = np.gcd.reduce(used, axis=1)
        return np.maximum(d, 1)

    def take(self, rows):
        return BinomialLikelihood(self.depths, self.shots[rows], self.hits[rows])

    def grid(self, phis):
        """``(n_rows, len(phis))`` log-likelihood table."""
        arg = np.outer(self.depths, phis)
        with np.errstate(divide="ignore"):
            log_sin = np.log(np.sin(arg) ** 2)
            log_cos = np.log(np.cos(arg) ** 2)
        np.maximum(log_sin, _LOG_FLOOR, out=log_sin)
        np.maximum(log_cos, _LOG_FLOOR, out=log_cos)
        return self.hits @ log_sin + self.misses @ log_cos

    def at(self, x):
        """Exact log-likelihood at per-row points ``x`` of shape ``(n_rows, C)``."""
        arg = x[..., None] * self.depths
        h = self.hits[:, None, :]
        m = self.misses[:, None, :]
        return np.sum(_xlog_sq(h, np.sin(arg)) + _xlog_sq(m, np.cos(arg)), axis=-1)

    def diff(self, x, y):
        """``at(x) - at(y)`` computed from trig differences, free of cancellation."""
        M = self.depths
        half_sum = 0.5 * (x + y)[..., None] * M
        half_gap = np.sin(0.5 * (x - y)[..., None] * M)
        s_y = np.sin(y[..., None] * M)
        c_y = np.cos(y[..., None] * M)
        with np.errstate(divide="ignore", invalid="ignore"):
            r_sin = 2.0 * np.cos(half_sum) * half_gap / s_y
            r_cos = -2.0 * np.sin(half_sum) * half_gap / c_y
            out = np.sum(
                _count_log_ratio(self.hits[:, None, :], r_sin)
                + _count_log_ratio(self.misses[:, None, :], r_cos),
                axis=-1,
            )
        bad = ~np.isfinite(out)
        if np.any(bad):
            with np.errstate(invalid="ignore"):
                direct = self.at(x) - self.at(y)
            out = np.where(bad, np.nan_to_num(direct, nan=0.0), out)
        return out


def _count_log_ratio(count, r):
    """``count * ln((1 + r)^2)``, keeping full precision when ``r`` is tiny."""
    small = np.abs(r) < 0.5
    with np.errstate(divide="ignore", invalid="ignore"):
        log_abs = np.where(small, np.log1p(np.where(small, r, 0.0)), np.log(np.abs(1.0 + r)))
        out = 2.0 * count * log_abs
    return np.where(count == 0, 0.0, out)


def _local_maxima_candidates(values, n_candidates):
    G = values.shape[1]
    left = np.empty_like(values)
    right = np.empty_like(values)
    left[:, 0] = -np.inf
    left[:, 1:] = values[:, :-1]
    right[:, -1] = -np.inf
    right[:, :-1] = values[:, 1:]
    masked = np.where((values >= left) & (values >= right), values, -np.inf)
    c = min(n_candidates, G)
    return np.argpartition(-masked, c - 1, axis=1)[:, :c]


def _golden_refine(family, lo, hi, xtol):
    width = float(np.max(hi - lo)) if lo.size else 0.0
    n_iter = max(1, math.ceil(math.log(max(width, xtol) / xtol) / math.log(1.0 / _GOLDEN)))
    for _ in range(n_iter):
        c = hi - _GOLDEN * (hi - lo)
        d = lo + _GOLDEN * (hi - lo)
        left = family.diff(c, d) >= 0.0
        hi = np.where(left, d, hi)
        lo = np.where(left, lo, c)
    return 0.5 * (lo + hi)


def maximize(family, n_points=None, n_candidates=N_CANDIDATES, xtol=PHI_TOL, block=2**22):
    """Row-wise maximizer of ``family`` over ``phi`` in ``[0, pi/2]``.

    Returns ``(phi_star, loglik_star)``, each of shape ``(n_rows,)``. Exact ties
    resolve to the smaller angle, including ties forced by the symmetries of
    families that expose ``symmetry_order``.
    """
    if n_points is None:
        n_points = scan_points(family.max_frequency)
    grid = np.linspace(0.0, HALF_PI, n_points)
    n_rows = len(family)
    phi_out = np.empty(n_rows)
    ll_out = np.empty(n_rows)
    rows_per_block = max(1, block // n_points)
    for start in range(0, n_rows, rows_per_block):
        rows = slice(start, min(n_rows, start + rows_per_block))
        sub = family.take(rows)
        values = sub.grid(grid)
        cand = _local_maxima_candidates(values, n_candidates)
        lo = grid[np.maximum(cand - 1, 0)]
        hi = grid[np.minimum(cand + 1, n_points - 1)]
        refined = _golden_refine(sub, lo, hi, xtol)
        best_grid = grid[np.argmax(values, axis=1)][:, None]
        points = np.concatenate([refined, best_grid, lo, hi], axis=1)
        ll = sub.at(points)
        top = np.max(ll, axis=1, keepdims=True)
        chosen = np.min(np.where(ll == top, points, np.inf), axis=1)
        if hasattr(sub, "symmetry_order"):
            # maxima related by an exact symmetry tie; report the smallest copy
            period = np.pi / sub.symmetry_order()
            u = np.mod(chosen, period)
            chosen = np.minimum(u, period - u)
        phi_out[rows] = chosen
        ll_out[rows] = top[:, 0]
    return phi_out, ll_out


def merge_records(records):
    """Combine records by depth: ``(depths, shots, hits)`` arrays."""
    acc = {}
    for rec in records:
        r, h = acc.get(rec.depth, (0, 0))
        acc[rec.depth] = (r + rec.shots, h + rec.hits)
    depths = np.array(sorted(acc), dtype=np.int64)
    shots = np.array([acc[m][0] for m in depths], dtype=np.int64)
    hits = np.array([acc[m][1] for m in depths], dtype=np.int64)
    return depths, shots, hits


def mle_batch(depths, shots, hits, n_points=None):
    """Maximum-likelihood amplitudes for each row of a count matrix."""
    family = BinomialLikelihood(depths, shots, hits)
    phi, _ = maximize(family, n_points=n_points)
    return np.sin(phi) ** 2


def mle_estimate(records, n_points=None):
    """Maximum-likelihood estimate of ``a`` from measurement records."""
    records = tuple(records)
    if not records or sum(rec.shots for rec in records) == 0:
        raise NoDataError("at least one record with shots > 0 is required")
    depths, shots, hits = merge_records(records)
    estimate = float(mle_batch(depths, shots[None, :], hits[None, :], n_points=n_points)[0])
    return EstimationOutcome(estimate=estimate, records=records, cost=oracle_cost(records))


def _check_interior(a):
    a = check_amplitude(a)
    if a in (0.0, 1.0):
        raise DomainError("Fisher information is singular at a = 0 and a = 1")
    return a


def fisher_information(schedule, a):
    """``sum_k R_k M_k^2 / (a (1 - a))`` for a schedule or record list."""
    a = _check_interior(a)
    if not isinstance(schedule, Schedule):
        items = tuple(schedule)
        schedule = Schedule.from_records(items) if items and isinstance(items[0], Record) else Schedule(items)
    weight = sum(r * m * m for m, r in schedule)
    return weight / (a * (1.0 - a))


def crlb_rmse(schedule, a):
    """Unbiased Cramer-Rao lower bound on the RMSE."""
    return 1.0 / math.sqrt(fisher_information(schedule, a))


@dataclass(frozen=True)
class PosteriorGrid:
    """Posterior over a uniform angle grid.

    ``density`` holds quadrature weights over ``a`` (Jacobian ``sin(2 phi)``
    included) and sums to one.
    """

    angles: np.ndarray
    density: np.ndarray

    @property
    def amplitudes(self):
        return np.sin(self.angles) ** 2

    def argmax(self):
        return float(self.amplitudes[np.argmax(self.density / np.sin(2 * self.angles))])


def posterior_angles(G):
    """Cell midpoints of a uniform ``G``-point partition of ``(0, pi/2)``."""
    return (np.arange(G) + 0.5) * (HALF_PI / G)


def posterior_batch(family, G=DEFAULT_POSTERIOR_GRID):
    """``(angles, density)`` with one normalized density row per record set."""
    angles = posterior_angles(G)
    ll = family.grid(angles)
    ll -= ll.max(axis=1, keepdims=True)
    dens = np.exp(ll) * np.sin(2.0 * angles)
    dens /= dens.sum(axis=1, keepdims=True)
    return angles, dens


def posterior(records, G=DEFAULT_POSTERIOR_GRID):
    """Posterior ``rho(a) ~ prod_k l_k(phi)`` on a ``G``-point angle grid."""
    G = check_int(G, "G", min_val=2)
    records = tuple(records)
    if records:
        depths, shots, hits = merge_records(records)
    else:
        depths, shots, hits = np.array([1]), np.zeros(1), np.zeros(1)
    family = BinomialLikelihood(depths, shots[None, :], hits[None, :])
    angles, dens = posterior_batch(family, G)
    return PosteriorGrid(angles=angles, density=dens[0])
