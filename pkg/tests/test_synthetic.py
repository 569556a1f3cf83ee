import itertools

import numpy as np
import pytest

from oblique_rmu.errors import InfeasibleSparsity
from oblique_rmu.model import ProblemInstance, objective_nssls
from oblique_rmu.synthetic import DatasetSpec, export_csv, generate, load_csv, zero_mask


def test_noiseless_consistency():
    d = generate(DatasetSpec(12, 15, 3, s=0.5, sigma=0.0, seed=4))
    np.testing.assert_array_equal(d.X, d.W_true @ d.H_true)
    assert objective_nssls(ProblemInstance(d.X, d.W_true, 0.0), d.H_true) == pytest.approx(0, abs=1e-25)


def test_no_sparsity_means_positive():
    d = generate(DatasetSpec(6, 10, 3, s=0.0, seed=1))
    assert d.H_true.min() > 0


@pytest.mark.parametrize("s", [0.0, 0.3, 0.6])
def test_h_true_simplex_and_zero_fraction(s):
    spec = DatasetSpec(20, 100, 3, s=s, sigma=0.1, seed=7)
    d = generate(spec)
    np.testing.assert_allclose(d.H_true.sum(axis=0), 1, atol=1e-12)
    assert d.H_true.min() >= 0 and d.X.min() >= 0
    assert np.count_nonzero(d.H_true == 0) == round(s * 300)
    assert (d.H_true > 0).any(axis=0).all()
    np.testing.assert_allclose(d.X, d.W_true @ d.H_true + 0.1 * d.E, rtol=1e-15)


def test_seed_reproducibility():
    spec = DatasetSpec(9, 11, 2, s=0.4, sigma=0.3, seed=123)
    a, b = generate(spec), generate(spec)
    for name in ("X", "W_true", "H_true", "E"):
        assert np.array_equal(getattr(a, name), getattr(b, name))
    c = generate(DatasetSpec(9, 11, 2, s=0.4, sigma=0.3, seed=124))
    assert not np.array_equal(a.X, c.X)


def test_infeasible_sparsity():
    with pytest.raises(InfeasibleSparsity):
        DatasetSpec(5, 4, 2, s=0.9)
    with pytest.raises(InfeasibleSparsity):
        zero_mask(np.random.default_rng(0), 1, 5, 0.5)


def test_mask_examples(rng):
    assert not zero_mask(rng, 4, 6, 0.0).any()
    for _ in range(200):
        mask = zero_mask(rng, 2, 2, 0.5)
        assert mask.sum() == 2
        assert not mask.all(axis=0).any()


def valid_masks(r, n, k):
    for idx in itertools.combinations(range(r * n), k):
        mask = np.zeros(r * n, dtype=bool)
        mask[list(idx)] = True
        mask = mask.reshape(r, n)
        if not mask.all(axis=0).any():
            yield mask


def test_mask_distribution_against_enumeration():
    r, n, k = 3, 4, 6
    masks = np.array(list(valid_masks(r, n, k)))
    entry_p = masks.mean(axis=0)
    col_count_p = np.array([(masks[:, :, 0].sum(axis=1) == z).mean() for z in range(r)])

    rng = np.random.default_rng(99)
    draws = 10_000
    samples = np.array([zero_mask(rng, r, n, 0.5) for _ in range(draws)])
    assert np.all(samples.sum(axis=(1, 2)) == k)
    freq = samples.mean(axis=0)
    se = np.sqrt(entry_p * (1 - entry_p) / draws)
    assert np.all(np.abs(freq - entry_p) <= 3 * se)
    counts = samples[:, :, 0].sum(axis=1)
    for z in range(r):
        p = col_count_p[z]
        f = (counts == z).mean()
        assert abs(f - p) <= 3 * np.sqrt(p * (1 - p) / draws) + 1e-12


def test_csv_round_trip(tmp_path):
    d = generate(DatasetSpec(4, 6, 2, s=0.25, sigma=0.1, seed=3))
    paths = export_csv(d, tmp_path)
    assert set(paths) == {"X", "W_true", "H_true"}
    for name, p in paths.items():
        assert np.array_equal(load_csv(p), getattr(d, name))
