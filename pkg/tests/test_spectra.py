import numpy as np
import pytest

from boundstate_lab.core.spectra import (
    as_spectrum,
    count_ge,
    eigh_descending,
    fan_check,
    minmax_eigenvalue,
    random_psd,
    schatten_norm,
    singular_values,
    variational_check,
    weak_quasinorm,
)
from boundstate_lab.exceptions import (
    InvalidParameterError,
    NegativeEntryError,
    NotPSDError,
    NotSymmetricError,
    ShapeMismatchError,
)


class TestSpectrum:
    def test_descending(self, rng):
        K = random_psd(rng, 9)
        spectrum = eigh_descending(K)
        assert np.all(np.diff(spectrum.values) <= 0)
        assert spectrum.top == pytest.approx(np.linalg.eigvalsh(K).max())

    def test_vectors(self, rng):
        K = random_psd(rng, 6)
        spectrum = eigh_descending(K, vectors=True)
        v = spectrum.vectors[:, 0]
        assert np.allclose(K @ v, spectrum.values[0] * v, atol=1e-10)

    def test_rejects_asymmetric(self):
        with pytest.raises(NotSymmetricError):
            eigh_descending(np.array([[1.0, 2.0], [0.0, 1.0]]))

    def test_as_spectrum_sorts(self):
        assert list(as_spectrum([1.0, 3.0, 2.0]).values) == [3.0, 2.0, 1.0]

    def test_singular_values_of_empty(self):
        assert len(singular_values(np.zeros((0, 0)))) == 0


class TestQuasinorms:
    def test_weak_trace(self):
        assert weak_quasinorm(as_spectrum([3.0, 1.0, 1.0]), 1.0) == pytest.approx(3.0)
        assert weak_quasinorm(as_spectrum([1.0, 1.0, 1.0]), 1.0) == pytest.approx(3.0)
        assert weak_quasinorm(as_spectrum([4.0, 1.0]), 2.0) == pytest.approx(4.0)

    def test_empty(self):
        assert weak_quasinorm(as_spectrum([]), 1.0) == 0.0
        assert schatten_norm(as_spectrum([]), 2.0) == 0.0

    def test_schatten(self):
        assert schatten_norm(as_spectrum([3.0, 4.0]), 2.0) == pytest.approx(5.0)
        assert schatten_norm(as_spectrum([3.0, 4.0]), 1.0) == pytest.approx(7.0)

    def test_rounding_noise_is_clipped(self):
        assert weak_quasinorm(as_spectrum([1.0, -1e-14]), 1.0) == pytest.approx(1.0)

    def test_negative_entry(self):
        with pytest.raises(NegativeEntryError):
            weak_quasinorm(as_spectrum([1.0, -0.5]), 1.0)

    def test_count_bounded_by_weak_norm(self, rng):
        for _ in range(20):
            spectrum = singular_values(random_psd(rng, 12))
            assert count_ge(spectrum, 1.0) <= weak_quasinorm(spectrum, 1.0) + 1e-12

    def test_count_ge(self):
        assert count_ge(as_spectrum([2.0, 1.0, 0.999]), 1.0) == 2


class TestVariational:
    def test_random_instances(self, rng):
        for _ in range(50):
            n = int(rng.integers(3, 20))
            K = random_psd(rng, n)
            F = rng.standard_normal((n, int(rng.integers(0, 4))))
            check = variational_check(K, F)
            assert check["holds"]
            assert check["interlacing_holds"]
            assert check["dim"] == F.shape[1]

    def test_rank_deficient_family(self, rng):
        K = random_psd(rng, 8)
        column = rng.standard_normal((8, 1))
        check = variational_check(K, np.hstack([column, 2 * column]))
        assert check["dim"] == 1

    def test_rejects_indefinite(self):
        with pytest.raises(NotPSDError):
            variational_check(-np.eye(4), np.zeros((4, 0)))


class TestFan:
    def test_random_instances(self, rng):
        for _ in range(50):
            n = int(rng.integers(3, 15))
            A = rng.standard_normal((n, n))
            B = rng.standard_normal((n, n))
            assert fan_check(A, B, int(rng.integers(1, n + 1)))["holds"]

    def test_index_past_rank(self):
        check = fan_check(np.eye(2), np.eye(2), 5)
        assert check["lhs"] == 0.0
        assert check["holds"]

    def test_shape_mismatch(self):
        with pytest.raises(ShapeMismatchError):
            fan_check(np.eye(2), np.eye(3), 1)

    def test_index_starts_at_one(self):
        with pytest.raises(InvalidParameterError):
            fan_check(np.eye(2), np.eye(2), 0)


class TestMinMax:
    def test_exact_and_sampled(self, rng):
        for _ in range(5):
            n = int(rng.integers(4, 10))
            K = random_psd(rng, n)
            j = int(rng.integers(0, n - 1))
            check = minmax_eigenvalue(K, j, rng, samples=30)
            assert check["exact"] == pytest.approx(check["eigenvalue"], rel=1e-9, abs=1e-12)
            assert check["sampled_min"] >= check["eigenvalue"] - 1e-9
