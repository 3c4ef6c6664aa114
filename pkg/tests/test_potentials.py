import numpy as np
import pytest

from boundstate_lab.core.numgrid import make_space_grid
from boundstate_lab.core.potentials import (
    PotentialSpec,
    bump,
    from_values,
    gaussian,
    load_samples,
    power,
    rescale_R,
    save_samples,
    scale_coupling,
    well,
)
from boundstate_lab.exceptions import (
    InvalidParameterError,
    NegativeAmplitudeError,
    NegativeCouplingError,
    NegativeValueError,
    NonpositiveRError,
    SampleParseError,
    ShapeMismatchError,
)


class TestBuild:
    def test_well_profile(self, grid_1d):
        P = well(grid_1d, 3.0, 1.0)
        inside = np.abs(grid_1d.axis) <= 1.0
        assert np.all(P.values[inside] == 3.0)
        assert np.all(P.values[~inside] == 0.0)
        assert P.decay_tag == "compact"
        assert not P.truncated

    def test_decay_tags(self, grid_1d):
        assert gaussian(grid_1d, 1.0).decay_tag == "gaussian"
        assert power(grid_1d, 1.0, beta=3.0).decay_tag == "power"
        assert bump(grid_1d, 1.0).decay_tag == "compact"

    def test_bump_is_smooth_and_compact(self, grid_1d):
        P = bump(grid_1d, 2.0, a=1.5)
        assert P.values.max() == pytest.approx(2.0)
        assert np.all(P.values[np.abs(grid_1d.axis) >= 1.5] == 0.0)

    def test_sqrt(self, gaussian_1d):
        assert np.allclose(gaussian_1d.sqrt**2, gaussian_1d.values)

    def test_truncation_flag(self):
        grid = make_space_grid(1, 4, 32)
        assert gaussian(grid, 1.0, w=3.0).truncated
        assert not gaussian(grid, 1.0, w=0.5).truncated

    def test_power_law_is_truncated(self, grid_1d):
        assert power(grid_1d, 1.0, beta=2.0).truncated

    def test_negative_amplitude(self, grid_1d):
        with pytest.raises(NegativeAmplitudeError):
            well(grid_1d, -1.0)
        with pytest.raises(NegativeAmplitudeError):
            from_values(grid_1d, -np.ones(grid_1d.size))

    def test_nonpositive_width(self, grid_1d):
        with pytest.raises(InvalidParameterError, match="Width a"):
            well(grid_1d, 1.0, 0.0)

    def test_values_are_read_only(self, gaussian_1d):
        with pytest.raises(ValueError):
            gaussian_1d.values[0] = 1.0

    def test_from_values_shape(self, grid_1d):
        with pytest.raises(ShapeMismatchError):
            from_values(grid_1d, np.ones(10))


class TestTransforms:
    def test_scale_coupling(self, gaussian_1d):
        scaled = scale_coupling(gaussian_1d, 2.0)
        assert np.allclose(scaled.values, 2 * gaussian_1d.values)
        assert scaled.coupling == 2.0
        assert scaled.spec.V0 == pytest.approx(10.0)
        assert scaled.label.startswith("2*")
        with pytest.raises(NegativeCouplingError):
            scale_coupling(gaussian_1d, -1.0)

    def test_zero_coupling(self, gaussian_1d):
        assert scale_coupling(gaussian_1d, 0.0).is_zero

    def test_rescale_analytic(self, gaussian_1d):
        R, s = 2.0, 1.0
        target = make_space_grid(1, 40, 128)
        dilated = rescale_R(gaussian_1d, R, s, grid=target)
        expected = R ** (-2 * s) * 5.0 * np.exp(-((target.axis / R) ** 2))
        assert np.allclose(dilated.values, expected, atol=1e-14)
        assert dilated.grid == target

    def test_rescale_identity(self, gaussian_1d):
        assert rescale_R(gaussian_1d, 1.0, 1.0) is gaussian_1d

    def test_rescale_sampled_trig(self, gaussian_1d):
        sampled = from_values(gaussian_1d.grid, gaussian_1d.values)
        target = make_space_grid(1, 40, 128)
        dilated = rescale_R(sampled, 2.0, 1.0, grid=target, method="trig")
        expected = 0.25 * 5.0 * np.exp(-((target.axis / 2.0) ** 2))
        assert np.allclose(dilated.values, expected, atol=1e-8)

    def test_rescale_rejects_nonpositive(self, gaussian_1d):
        with pytest.raises(NonpositiveRError):
            rescale_R(gaussian_1d, 0.0, 1.0)

    def test_dilated_spec(self):
        spec = PotentialSpec("well", 4.0, a=1.0).dilated(2.0, 1.0, 1)
        assert spec.V0 == pytest.approx(1.0)
        assert spec.a == pytest.approx(2.0)


class TestSamples:
    def test_round_trip(self, tmp_path, gaussian_1d):
        path = save_samples(gaussian_1d, tmp_path / "g.txt")
        loaded = load_samples(path)
        assert loaded.grid == gaussian_1d.grid
        assert np.array_equal(loaded.values, gaussian_1d.values)
        assert loaded.decay_tag == "sampled"
        assert loaded.name == "g"

    def test_grid_mismatch(self, tmp_path, gaussian_1d):
        path = save_samples(gaussian_1d, tmp_path / "g.txt")
        with pytest.raises(ShapeMismatchError):
            load_samples(path, make_space_grid(1, 20, 64))

    def test_negative_sample(self, tmp_path):
        path = tmp_path / "neg.txt"
        path.write_text("# 1 4.0 8\n" + "\n".join(["1.0"] * 7 + ["-0.5"]) + "\n")
        with pytest.raises(NegativeValueError):
            load_samples(path)

    def test_bad_header(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("1 4.0 8\n1.0\n")
        with pytest.raises(SampleParseError):
            load_samples(path)

    def test_row_count(self, tmp_path):
        path = tmp_path / "short.txt"
        path.write_text("# 1 4.0 8\n1.0\n2.0\n")
        with pytest.raises(ShapeMismatchError):
            load_samples(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(SampleParseError):
            load_samples(tmp_path / "absent.txt")
