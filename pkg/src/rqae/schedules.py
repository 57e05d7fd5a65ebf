"""Depth schedules, critical points and the critical-point score."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._validation import check_int
from .errors import DomainError
from .sampling import Schedule


def schedule_lis(K, R):
    """Linear sequence: depths ``1, 3, ..., 2K - 1``, ``R`` shots each."""
    K = check_int(K, "K", min_val=1)
    R = check_int(R, "R", min_val=1)
    return Schedule(tuple((2 * k - 1, R) for k in range(1, K + 1)))


def eis_depths(K):
    return [1] + [2 ** (k - 1) + 1 for k in range(2, K + 1)]


def schedule_eis(K, R):
    """Exponential sequence: depths ``1, 3, 5, 9, 17, ...``, ``R`` shots each."""
    K = check_int(K, "K", min_val=1)
    R = check_int(R, "R", min_val=1)
    return Schedule(tuple((M, R) for M in eis_depths(K)))


def jitter_window(M):
    """Depths replacing ``M`` in the jittered schedule."""
    half = max(1, M // 4)
    return list(range(max(2, M - half), M + half + 1))


def schedule_djqae(K, R):
    """EIS with every depth ``M >= 3`` spread round-robin over ``jitter_window(M)``."""
    base = schedule_eis(K, R)
    entries = []
    for M, shots in base:
        if M < 3:
            entries.append((M, shots))
            continue
        window = jitter_window(M)
        alloc = [0] * len(window)
        for s in range(shots):
            alloc[s % len(window)] += 1
        entries.extend((m, r) for m, r in zip(window, alloc) if r > 0)
    return Schedule(tuple(entries))


def schedule_from_depths(depths, R):
    R = check_int(R, "R", min_val=1)
    return Schedule(tuple((int(M), R) for M in depths))


@dataclass(frozen=True)
class CriticalPointSet:
    order: int
    points: tuple

    def __iter__(self):
        return iter(self.points)

    def __len__(self):
        return len(self.points)


def critical_points(m):
    """Critical points ``sin^2(j pi / (2m))``, ``j = 1..m-1``, in increasing order."""
    if isinstance(m, bool) or int(m) != m or m < 2:
        raise DomainError(f"critical points need an integer order >= 2, got {m!r}")
    m = int(m)
    return CriticalPointSet(order=m, points=tuple(math.sin(j * math.pi / (2 * m)) ** 2 for j in range(1, m)))


def score(M, a_hat):
    """``sin^2(2 M arcsin(sqrt(a_hat)))``; zero at the critical points of order ``M``."""
    a_arr = np.asarray(a_hat, dtype=float)
    if np.any((a_arr < 0.0) | (a_arr > 1.0)):
        raise DomainError("a_hat must lie in [0, 1]")
    out = np.sin(2 * np.asarray(M) * np.arcsin(np.sqrt(a_arr))) ** 2
    return float(out) if out.ndim == 0 else out
