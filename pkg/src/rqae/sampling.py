"""Classical model of the amplitude oracle.

Hit probabilities for any depth, binomial measurement sampling, oracle-call
accounting and the per-trial random stream derivation used everywhere else.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np

from ._validation import check_amplitude, check_angle, check_int
from .errors import DomainError


@dataclass(frozen=True)
class AmplitudeModel:
    """Ground truth ``a = sin^2(phi)`` hidden behind the oracle."""

    a: float
    phi: float = field(init=False)

    def __post_init__(self):
        a = check_amplitude(self.a)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "phi", angle_of(a))

    @classmethod
    def from_angle(cls, phi):
        phi = check_angle(phi)
        model = cls(min(1.0, math.sin(phi) ** 2))
        object.__setattr__(model, "phi", phi)
        return model


@dataclass(frozen=True)
class Record:
    """Outcome of measuring ``r_M`` for ``shots`` times, ``hits`` of them one."""

    depth: int
    shots: int
    hits: int

    def __post_init__(self):
        check_int(self.depth, "depth", min_val=1)
        check_int(self.shots, "shots", min_val=0)
        check_int(self.hits, "hits", min_val=0)
        if self.hits > self.shots:
            raise ValueError(f"hits={self.hits} exceeds shots={self.shots}")


@dataclass(frozen=True)
class Schedule:
    """Ordered ``(depth, shots)`` pairs."""

    entries: tuple = ()

    def __post_init__(self):
        entries = tuple((int(m), int(r)) for m, r in self.entries)
        for m, r in entries:
            if m < 1:
                raise ValueError(f"depth must be >= 1, got {m}")
            if r < 0:
                raise ValueError(f"shots must be >= 0, got {r}")
        object.__setattr__(self, "entries", entries)

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    @property
    def depths(self):
        return np.array([m for m, _ in self.entries], dtype=np.int64)

    @property
    def shots(self):
        return np.array([r for _, r in self.entries], dtype=np.int64)

    @classmethod
    def from_records(cls, records: Iterable[Record]):
        return cls(tuple((rec.depth, rec.shots) for rec in records))


def angle_of(a):
    """Angle ``arcsin(sqrt(a))`` in ``[0, pi/2]``."""
    a = check_amplitude(a)
    return math.asin(math.sqrt(a))


def hit_probability(M, a):
    """Probability ``sin^2(M * arcsin(sqrt(a)))`` of measuring one at depth ``M``.

    Works for odd and even depths alike. Accepts numpy arrays for ``M`` and
    ``a`` (broadcast together); scalar inputs return a float.
    """
    M_arr = np.asarray(M)
    a_arr = np.asarray(a, dtype=float)
    if np.any(M_arr < 1):
        raise DomainError("depth must be >= 1")
    if np.any((a_arr < 0.0) | (a_arr > 1.0)):
        raise DomainError("amplitude must lie in [0, 1]")
    p = np.sin(M_arr * np.arcsin(np.sqrt(a_arr))) ** 2
    if p.ndim == 0:
        return float(p)
    return p


def measure_r(M, R, model: AmplitudeModel, rng: np.random.Generator):
    """Number of ones among ``R`` measurements of ``r_M``."""
    R = check_int(R, "R", min_val=0)
    return int(rng.binomial(R, hit_probability(M, model.a)))


def oracle_cost(schedule) -> int:
    """Total oracle calls ``sum_k R_k M_k`` of a schedule or record list."""
    total = 0
    for item in schedule:
        if isinstance(item, Record):
            total += item.shots * item.depth
        else:
            m, r = item
            total += int(m) * int(r)
    return total


def _name_key(name: str) -> int:
    return int.from_bytes(hashlib.blake2b(name.encode("utf-8"), digest_size=8).digest(), "little")


def trial_rng(seed: int, config: str, trial: int) -> np.random.Generator:
    """Independent stream for ``trial`` of configuration ``config``.

    The stream is a pure function of ``(seed, config, trial)`` so trials can be
    evaluated in any order or in parallel without changing results.
    """
    ss = np.random.SeedSequence(int(seed), spawn_key=(_name_key(config), int(trial)))
    return np.random.Generator(np.random.Philox(ss))


def trial_rngs(seed: int, config: str, trials: Iterable[int]) -> list[np.random.Generator]:
    return [trial_rng(seed, config, t) for t in trials]
