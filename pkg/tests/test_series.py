import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thermal_repeller.errors import ConfigError, NumericalError
from thermal_repeller.series import TimeSeries, format_value, read_csv


def _series():
    return TimeSeries.from_columns({"t_bar": [0.0, 0.5, 1.0], "p": [0.1, 0.2, 0.3]},
                                   (("model", "ck"), ("omega_bar", 0.05)))


def test_round_trip(tmp_path):
    s = _series()
    path = tmp_path / "a.csv"
    s.write(path)
    back = read_csv(path)
    assert back.columns == s.columns
    np.testing.assert_array_equal(back.rows, s.rows)
    assert dict(back.metadata) == {"model": "ck", "omega_bar": "0.05"}


def test_text_layout():
    lines = _series().to_csv_text().splitlines()
    assert lines[:3] == ["# model: ck", "# omega_bar: 0.05", "t_bar,p"]
    assert lines[3] == "0.00000000000e+00,1.00000000000e-01"


def test_byte_identical(tmp_path):
    _series().write(tmp_path / "a.csv")
    _series().write(tmp_path / "b.csv")
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_column_lookup():
    np.testing.assert_array_equal(_series().column("p"), [0.1, 0.2, 0.3])


@pytest.mark.parametrize("value, text", [(True, "True"), (None, "None"), (0.1, "0.1"),
                                         (np.float64(2.5), "2.5"), ([1.0, 2], "1.0 2"),
                                         ("ck", "ck")])
def test_format_value(value, text):
    assert format_value(value) == text


def test_rejects_wrong_width():
    with pytest.raises(ConfigError):
        TimeSeries(("a", "b"), np.zeros((3, 3)))


def test_rejects_unsorted_abscissa():
    with pytest.raises(ConfigError):
        TimeSeries(("a", "b"), [[1.0, 0.0], [0.0, 0.0]])


def test_rejects_non_finite():
    with pytest.raises(NumericalError):
        TimeSeries(("a", "b"), [[0.0, np.nan]])


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-1e300, 1e300, allow_nan=False), min_size=1, max_size=20))
def test_values_survive_to_twelve_digits(values):
    s = TimeSeries.from_columns({"i": np.arange(len(values)), "v": values})
    text = s.to_csv_text().splitlines()[1:]
    parsed = np.array([float(line.split(",")[1]) for line in text])
    np.testing.assert_allclose(parsed, values, rtol=1e-11, atol=0)
