import numpy as np
import pytest

from morphoevo.errors import ConfigError
from morphoevo.sampling import (SamplePlan, ZipfSpec, choose_focus,
                                sample_without_replacement, zipf_weights)


def test_zipf_weights_classic():
    w = zipf_weights(3, 1.0)
    assert np.allclose(w, [6 / 11, 3 / 11, 2 / 11])


def test_zipf_weights_properties():
    for n, s in [(1, 2.0), (5, 1.0), (40, 0.7)]:
        w = zipf_weights(n, s)
        assert abs(w.sum() - 1.0) < 1e-12
        assert (np.diff(w) < 0).all() or n == 1


def test_zipf_weights_rejects_bad_args():
    with pytest.raises(ConfigError):
        zipf_weights(0, 1.0)
    with pytest.raises(ConfigError):
        zipf_weights(3, 0.0)


def test_zipf_spec_disabled_is_uniform():
    assert ZipfSpec().weights(10) is None  # None -> uniform fast path


def test_zipf_spec_permutation_is_bijection():
    spec = ZipfSpec(enabled=True, s=1.0, rank_permutation_seed=9)
    w = spec.weights(6)
    assert abs(w.sum() - 1.0) < 1e-12
    assert sorted(np.round(w, 12)) == sorted(np.round(zipf_weights(6, 1.0), 12))


def test_sample_without_replacement_exhaustive():
    rng = np.random.default_rng(0)
    idx = sample_without_replacement(np.full(5, 0.2), 5, rng)
    assert sorted(idx) == [0, 1, 2, 3, 4]


def test_sample_without_replacement_no_repeats():
    rng = np.random.default_rng(1)
    w = zipf_weights(20, 1.0)
    for _ in range(100):
        idx = sample_without_replacement(w, 7, rng)
        assert len(idx) == 7
        assert len(set(idx.tolist())) == 7


def test_sample_without_replacement_rejects():
    rng = np.random.default_rng(0)
    with pytest.raises(ConfigError):
        sample_without_replacement(np.array([0.5, 0.5]), 3, rng)
    with pytest.raises(ConfigError):
        sample_without_replacement(np.array([1.0, 0.0]), 1, rng)


def test_sample_inclusion_tracks_weight():
    # index 0 holds 90% of the mass; in 10k single draws it should win
    # about 9000 times (3 sigma of Binomial(1e4, 0.9) is ~90)
    rng = np.random.default_rng(2024)
    w = np.array([0.9, 0.05, 0.05])
    hits = sum(sample_without_replacement(w, 1, rng)[0] == 0
               for _ in range(10_000))
    assert abs(hits - 9000) <= 3 * np.sqrt(10_000 * 0.9 * 0.1)


def test_choose_focus_uniform():
    rng = np.random.default_rng(3)
    counts = np.zeros(4)
    for _ in range(8000):
        counts[choose_focus(np.full(4, 0.25), rng)] += 1
    assert (np.abs(counts - 2000) < 3 * np.sqrt(8000 * 0.25 * 0.75)).all()


def test_choose_focus_reciprocal():
    # weights (6/11, 3/11, 2/11) invert to focus probs (1/6, 1/3, 1/2)
    rng = np.random.default_rng(4)
    w = zipf_weights(3, 1.0)
    counts = np.zeros(3)
    n = 30_000
    for _ in range(n):
        counts[choose_focus(w, rng)] += 1
    expect = np.array([1 / 6, 1 / 3, 1 / 2]) * n
    sigma = np.sqrt(n * np.array([1 / 6, 1 / 3, 1 / 2])
                    * np.array([5 / 6, 2 / 3, 1 / 2]))
    assert (np.abs(counts - expect) < 3 * sigma).all()


def test_choose_focus_single_item():
    assert choose_focus(np.array([1.0]), np.random.default_rng(0)) == 0


def test_sample_plan_validation():
    with pytest.raises(ConfigError):
        SamplePlan(evidence_fraction=0.0)
    with pytest.raises(ConfigError):
        SamplePlan(evidence_fraction=1.5)
    with pytest.raises(ConfigError):
        SamplePlan(num_pivots=0)


def test_sampling_replays_under_same_seed():
    w = zipf_weights(12, 1.0)
    a = [sample_without_replacement(w, 4, np.random.default_rng(99)) for _ in range(1)]
    b = [sample_without_replacement(w, 4, np.random.default_rng(99)) for _ in range(1)]
    assert (a[0] == b[0]).all()
