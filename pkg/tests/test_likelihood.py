import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rqae import (
    DomainError,
    NoDataError,
    Record,
    Schedule,
    crlb_rmse,
    fisher_information,
    log_likelihood,
    mle_estimate,
    posterior,
)
from rqae.schedules import schedule_eis

from .oracles import brute_force_phi, mp_log_likelihood

records_strategy = st.lists(
    st.tuples(st.integers(1, 33), st.integers(0, 32), st.floats(0, 1)).map(
        lambda t: Record(t[0], t[1], int(round(t[1] * t[2])))
    ),
    min_size=1,
    max_size=5,
)


def test_log_likelihood_examples():
    assert log_likelihood([Record(1, 4, 2)], math.pi / 4) == pytest.approx(4 * math.log(0.5), rel=1e-14)
    assert log_likelihood([Record(1, 4, 4)], 0.0) == -math.inf
    assert log_likelihood([Record(1, 4, 0)], 0.0) == 0.0


def test_log_likelihood_matches_high_precision():
    records = [Record(1, 32, 8), Record(3, 32, 20)]
    assert log_likelihood(records, 0.5) == pytest.approx(mp_log_likelihood(records, mpmath.mpf("0.5")), rel=1e-13)


@given(records_strategy, st.randoms())
def test_log_likelihood_permutation_invariant(records, rnd):
    shuffled = list(records)
    rnd.shuffle(shuffled)
    assert log_likelihood(shuffled, 0.7) == pytest.approx(log_likelihood(records, 0.7), rel=1e-12, abs=1e-12)


@given(st.integers(1, 40), st.integers(0, 20), st.integers(0, 20), st.data(), st.floats(0.01, 1.56))
def test_log_likelihood_merging_invariant(M, R1, R2, data, phi):
    h1 = data.draw(st.integers(0, R1))
    h2 = data.draw(st.integers(0, R2))
    split = log_likelihood([Record(M, R1, h1), Record(M, R2, h2)], phi)
    merged = log_likelihood([Record(M, R1 + R2, h1 + h2)], phi)
    assert split == pytest.approx(merged, rel=1e-12, abs=1e-12)


def test_mle_single_depth_one():
    assert mle_estimate([Record(1, 100, 25)]).estimate == pytest.approx(0.25, abs=1e-9)
    assert mle_estimate([Record(1, 10, 0)]).estimate == 0.0
    assert mle_estimate([Record(1, 10, 10)]).estimate == pytest.approx(1.0, abs=1e-12)


@given(st.integers(1, 200), st.data())
@settings(max_examples=40, deadline=None)
def test_mle_depth_one_is_hit_fraction(R, data):
    h = data.draw(st.integers(0, R))
    assert mle_estimate([Record(1, R, h)]).estimate == pytest.approx(h / R, abs=1e-9)


def test_mle_three_depths_matches_brute_force():
    R = 32
    records = [Record(M, R, round(R * math.sin(M * 0.4) ** 2)) for M in (1, 3, 5)]
    out = mle_estimate(records)
    phi_bf = brute_force_phi(records)
    assert math.asin(math.sqrt(out.estimate)) == pytest.approx(phi_bf, abs=1e-6)
    # rounded counts move the maximizer by ~2.6e-3 in a away from sin^2(0.4)
    assert out.estimate == pytest.approx(0.1542754, abs=1e-6)
    assert out.cost == 32 * 9


def test_mle_outcome_fields():
    records = [Record(1, 10, 3), Record(5, 4, 1)]
    out = mle_estimate(records)
    assert out.records == tuple(records)
    assert out.cost == 30
    assert 0.0 <= out.estimate <= 1.0


def test_mle_requires_shots():
    with pytest.raises(NoDataError):
        mle_estimate([])
    with pytest.raises(NoDataError):
        mle_estimate([Record(3, 0, 0)])


@given(records_strategy, st.randoms())
@settings(max_examples=30, deadline=None)
def test_mle_permutation_invariant(records, rnd):
    if sum(r.shots for r in records) == 0:
        return
    shuffled = list(records)
    rnd.shuffle(shuffled)
    assert mle_estimate(shuffled).estimate == mle_estimate(records).estimate


def test_fisher_information_values():
    assert fisher_information(Schedule(((1, 1),)), 0.5) == 4.0
    assert fisher_information(schedule_eis(5, 32), 0.5) == 51840.0
    assert fisher_information(Schedule(((1, 50),)), 0.2) == pytest.approx(50 / (0.2 * 0.8), rel=1e-15)


def test_fisher_information_singular_at_boundary():
    for a in (0.0, 1.0):
        with pytest.raises(DomainError):
            fisher_information(Schedule(((1, 1),)), a)
        with pytest.raises(DomainError):
            crlb_rmse(Schedule(((1, 1),)), a)


def test_crlb_values():
    assert crlb_rmse(schedule_eis(5, 32), 0.5) == pytest.approx(1 / math.sqrt(51840), abs=1e-15)
    assert crlb_rmse(schedule_eis(5, 32), 0.5) == pytest.approx(4.392e-3, abs=5e-7)
    assert crlb_rmse(Schedule(((1, 64),)), 0.3) == pytest.approx(math.sqrt(0.21 / 64), rel=1e-14)


def test_crlb_halves_variance_when_shots_double():
    base = schedule_eis(4, 16)
    doubled = Schedule(tuple((m, 2 * r) for m, r in base))
    assert crlb_rmse(doubled, 0.3) == pytest.approx(crlb_rmse(base, 0.3) / math.sqrt(2), rel=1e-14)


def test_fisher_matches_sampled_score_variance():
    schedule = Schedule(((1, 8), (3, 8)))
    a, eps, n = 0.3, 1e-6, 100_000
    rng = np.random.default_rng(5)
    depths = schedule.depths
    p = np.sin(depths * math.asin(math.sqrt(a))) ** 2
    hits = rng.binomial(schedule.shots, p, size=(n, len(depths)))

    def ll(x):
        phi = math.asin(math.sqrt(x))
        s, c = np.sin(depths * phi) ** 2, np.cos(depths * phi) ** 2
        return (hits * np.log(s) + (schedule.shots - hits) * np.log(c)).sum(axis=1)

    dscore = (ll(a + eps) - ll(a - eps)) / (2 * eps)
    assert np.mean(dscore**2) == pytest.approx(fisher_information(schedule, a), rel=0.03)


def test_posterior_flat_prior():
    post = posterior([], 256)
    assert post.density.sum() == pytest.approx(1.0, abs=1e-12)
    jac = np.sin(2 * post.angles)
    assert np.allclose(post.density / jac, (post.density / jac)[0])


def test_posterior_concentrates():
    post = posterior([Record(1, 10_000, 2500)], 4096)
    cell = (math.pi / 2) / 4096
    assert abs(math.asin(math.sqrt(post.argmax())) - math.pi / 6) <= 2 * cell


@given(records_strategy)
@settings(max_examples=30, deadline=None)
def test_posterior_normalized_and_nonnegative(records):
    post = posterior(records, 512)
    assert np.all(post.density >= 0)
    assert post.density.sum() == pytest.approx(1.0, abs=1e-9)


@given(records_strategy)
@settings(max_examples=30, deadline=None)
def test_posterior_argmax_matches_grid_oracle(records):
    G = 2048
    post = posterior(records, G)
    angles = (np.arange(G) + 0.5) * (math.pi / 2) / G
    # mode of the density over a: the prior is flat in a, so this is the grid likelihood
    logp = np.zeros(G)
    with np.errstate(divide="ignore"):
        for rec in records:
            if rec.hits:
                logp += rec.hits * np.log(np.sin(rec.depth * angles) ** 2)
            if rec.shots - rec.hits:
                logp += (rec.shots - rec.hits) * np.log(np.cos(rec.depth * angles) ** 2)
    best = logp.max()
    chosen = int(np.argmin(np.abs(angles - math.asin(math.sqrt(post.argmax())))))
    assert logp[chosen] >= best - 1e-9 * max(1.0, abs(best))


def test_posterior_argmax_near_mle_single_peak():
    records = [Record(1, 400, 130), Record(3, 400, 310)]
    G = 4096
    phi_post = math.asin(math.sqrt(posterior(records, G).argmax()))
    phi_mle = math.asin(math.sqrt(mle_estimate(records).estimate))
    assert abs(phi_post - phi_mle) <= 2 * (math.pi / 2) / G


@pytest.mark.parametrize(
    "records",
    [
        [Record(10, 16, 10)],
        [Record(24, 28, 7)],
        [Record(15, 2, 2), Record(27, 15, 4)],
        [Record(2, 29, 29), Record(18, 11, 3)],
    ],
)
def test_symmetric_likelihood_reports_smallest_maximizer(records):
    d = math.gcd(*[r.depth for r in records])
    phi = math.asin(math.sqrt(mle_estimate(records).estimate))
    assert 0.0 <= phi <= math.pi / (2 * d) + 1e-12
    copies = [phi + k * math.pi / d for k in range(d)] + [k * math.pi / d - phi for k in range(1, d + 1)]
    for c in copies:
        if 0.0 <= c <= math.pi / 2:
            assert log_likelihood(records, c) == pytest.approx(log_likelihood(records, phi), abs=1e-9)
