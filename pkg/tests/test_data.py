import numpy as np
import pytest

from sparsekm._rng import rng_for
from sparsekm.data import (as_matrix, bcss_per_feature, between_group_ss,
                           read_csv_matrix, standardize, total_ss,
                           weighted_wcss, write_csv_matrix)
from sparsekm.errors import DataError, EmptyCluster, NonFiniteInput


def eq4_bruteforce(x, labels, k):
    """Independent oracle: the ordered-pair double sum, O(n^2 p)."""
    x = np.asarray(x, dtype=float)
    n, p = x.shape
    a = np.zeros(p)
    for j in range(p):
        d = (x[:, j][:, None] - x[:, j][None, :]) ** 2
        total = d.sum() / n
        within = 0.0
        for c in range(k):
            idx = np.flatnonzero(labels == c)
            within += d[np.ix_(idx, idx)].sum() / idx.size
        a[j] = total - within
    return a


def random_partition(rng, n, k):
    """Uniform labels conditioned on no empty cluster."""
    while True:
        labels = rng.integers(0, k, size=n)
        if np.bincount(labels, minlength=k).min() > 0:
            return labels


class TestStandardize:
    def test_two_point_column(self):
        out = standardize(np.array([[1.0], [3.0]]))
        assert np.allclose(out[:, 0], [-0.7071067811865475, 0.7071067811865475])

    def test_mean_zero_sd_one(self):
        x = rng_for(7).standard_normal((40, 6)) * 3 + 5
        out = standardize(x)
        assert np.allclose(out.mean(axis=0), 0, atol=1e-9)
        assert np.allclose(out.std(axis=0, ddof=1), 1, atol=1e-9)

    def test_constant_column_needs_flag(self):
        x = np.array([[5.0, 1.0], [5.0, 2.0], [5.0, 3.0]])
        with pytest.raises(DataError):
            standardize(x)
        out = standardize(x, allow_constant=True)
        assert np.all(out[:, 0] == 0.0)

    def test_idempotent(self):
        x = standardize(rng_for(8).standard_normal((20, 3)))
        assert np.allclose(standardize(x), x, atol=1e-12)

    def test_nonfinite_rejected(self):
        x = np.ones((3, 2))
        x[1, 0] = np.nan
        with pytest.raises(NonFiniteInput):
            standardize(x)


class TestBcss:
    def test_two_singletons(self):
        a = bcss_per_feature(np.array([[0.0], [2.0]]), [0, 1], 2)
        assert a[0] == pytest.approx(4.0)

    def test_single_cluster_is_zero(self):
        x = rng_for(3).standard_normal((6, 2))
        assert np.allclose(bcss_per_feature(x, [0] * 6, 1), 0.0, atol=1e-9)

    def test_two_pairs(self):
        # (1,1,5,5) split {0,1} vs {2,3}: the ordered-pair double sum gives 32
        a = bcss_per_feature(np.array([[1.0], [1.0], [5.0], [5.0]]),
                             [0, 0, 1, 1], 2)
        assert a[0] == pytest.approx(32.0, rel=1e-12)

    def test_matches_bruteforce(self):
        rng = rng_for(11)
        for trial in range(100):
            n = int(rng.integers(4, 13))
            p = int(rng.integers(1, 7))
            k = int(rng.integers(2, min(n, 4) + 1))
            x = rng.standard_normal((n, p))
            labels = random_partition(rng, n, k)
            a = bcss_per_feature(x, labels, k)
            ref = eq4_bruteforce(x, labels, k)
            assert np.allclose(a, ref, rtol=1e-9, atol=1e-9)

    def test_factor_two_bridge(self):
        rng = rng_for(12)
        for trial in range(50):
            n, p, k = 10, 4, 3
            x = rng.standard_normal((n, p))
            labels = random_partition(rng, n, k)
            assert np.allclose(bcss_per_feature(x, labels, k),
                               2.0 * between_group_ss(x, labels, k),
                               rtol=1e-9)

    def test_empty_cluster(self):
        with pytest.raises(EmptyCluster):
            bcss_per_feature(np.eye(4), [0, 0, 1, 1], 3)

    def test_decomposition(self):
        rng = rng_for(13)
        for trial in range(50):
            n, p, k = 9, 5, 3
            x = rng.standard_normal((n, p))
            labels = random_partition(rng, n, k)
            w = rng.uniform(0, 2, size=p)
            lhs = float(w @ bcss_per_feature(x, labels, k)) \
                + weighted_wcss(x, labels, w, k)
            assert lhs == pytest.approx(total_ss(x, w), rel=1e-9)

    def test_noise_nullity_at_expectation(self):
        # standardized noise column, uniform random partitions: the
        # between-group SS averages K - 1
        rng = rng_for(14)
        n, k, draws = 30, 3, 2000
        col = standardize(rng.standard_normal((n, 1)))
        vals = np.empty(draws)
        for t in range(draws):
            labels = random_partition(rng, n, k)
            vals[t] = between_group_ss(col, labels, k)[0]
        se = vals.std(ddof=1) / np.sqrt(draws)
        assert abs(vals.mean() - (k - 1)) < 3 * se


class TestWcss:
    def test_zero_weights(self):
        x = rng_for(1).standard_normal((5, 3))
        assert weighted_wcss(x, [0, 0, 1, 1, 1], np.zeros(3), 2) == 0.0

    def test_one_cluster_pair(self):
        assert weighted_wcss(np.array([[0.0], [2.0]]), [0, 0], [1.0], 1) \
            == pytest.approx(4.0)

    def test_singletons(self):
        x = np.array([[0.0], [5.0]])
        assert weighted_wcss(x, [0, 1], [1.0], 2) == 0.0


class TestTotalSs:
    def test_pair(self):
        assert total_ss(np.array([[-1.0], [1.0]]), [1.0]) == pytest.approx(4.0)

    def test_zero_weight(self):
        assert total_ss(np.array([[-1.0], [1.0]]), [0.0]) == 0.0

    def test_identical_rows(self):
        assert total_ss(np.ones((4, 2)), [1.0, 1.0]) == 0.0


class TestCsv:
    def test_round_trip(self, tmp_path):
        x = rng_for(5).standard_normal((7, 3))
        path = tmp_path / "m.csv"
        write_csv_matrix(path, x)
        back = read_csv_matrix(path)
        assert np.array_equal(back, x)

    def test_parse_error_reports_line(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("1.0,2.0\n1.0,oops\n")
        with pytest.raises(DataError, match="bad.csv:2"):
            read_csv_matrix(path)

    def test_header_flag(self, tmp_path):
        path = tmp_path / "h.csv"
        path.write_text("a,b\n1,2\n3,4\n")
        assert read_csv_matrix(path, header=True).shape == (2, 2)

    def test_ragged_rejected(self, tmp_path):
        path = tmp_path / "r.csv"
        path.write_text("1,2\n3\n")
        with pytest.raises(DataError, match="r.csv:2"):
            read_csv_matrix(path)


def test_as_matrix_shape_checks():
    with pytest.raises(DataError):
        as_matrix(np.ones(3))
    with pytest.raises(DataError):
        as_matrix(np.ones((1, 3)))
