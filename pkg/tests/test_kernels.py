"""Both kernel backends must agree; the active one is env-selected."""

import numpy as np
import pytest

from fedfraud import kernels


class TestBackendSelection:
    def test_backend_reports_a_known_name(self):
        assert kernels.backend() in ("numba", "numpy")

    def test_public_sigmoid_matches_numpy_reference(self):
        z = np.random.default_rng(0).normal(scale=10.0, size=(8, 5))
        ref = kernels._sigmoid_flat_np(z.ravel()).reshape(z.shape)
        assert np.array_equal(kernels.sigmoid(z), ref)


@pytest.mark.skipif(not kernels.HAVE_NUMBA, reason="numba unavailable")
class TestBackendsAgree:
    def test_sigmoid_agrees_to_ulp(self):
        # numba's scalar exp and numpy's vectorized exp can differ in the
        # last bit, so demand ulp-level agreement rather than bit equality.
        z = np.random.default_rng(1).normal(scale=50.0, size=2000)
        a = kernels._sigmoid_flat_nb(z)
        b = kernels._sigmoid_flat_np(z)
        assert np.max(np.abs(a - b)) <= 5e-16

    def test_best_split_agrees(self):
        rng = np.random.default_rng(2)
        for _ in range(30):
            n = int(rng.integers(5, 60))
            X = np.round(rng.normal(size=(n, 3)), 1)
            y = rng.integers(0, 2, size=n).astype(np.float64)
            nb = kernels._best_split_nb(X, y, 1)
            np_ = kernels._best_split_np(X, y, 1)
            assert nb[0] == np_[0]
            if nb[0] >= 0:
                assert nb[1] == pytest.approx(np_[1], abs=1e-12)
                assert nb[2] == pytest.approx(np_[2], abs=1e-12)

    def test_best_split_respects_min_leaf(self):
        X = np.arange(10, dtype=np.float64).reshape(10, 1)
        y = np.array([0, 0, 0, 0, 0, 1, 1, 1, 1, 1], dtype=np.float64)
        f, t, g = kernels.best_split(X, y, 4)
        assert f == 0
        assert 2.5 <= t <= 6.5

    def test_no_admissible_split(self):
        X = np.ones((4, 2))
        y = np.array([0.0, 1.0, 0.0, 1.0])
        f, _, _ = kernels.best_split(X, y, 1)
        assert f == -1
