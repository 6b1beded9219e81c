import numpy as np
import pytest

from lppl_pm.exceptions import DataError
from lppl_pm.series import TimeSeries
from lppl_pm.validation import check_int, check_interval, check_series, check_values


def test_check_series():
    ts = check_series([1.0, 2.0, 3.0])
    assert isinstance(ts, TimeSeries) and len(ts) == 3
    assert check_series(ts) is ts
    assert len(check_series(np.ones((4, 1)))) == 4
    with pytest.raises(DataError):
        check_series(np.ones((2, 2)))
    with pytest.raises(DataError):
        check_series([])
    with pytest.raises(DataError):
        check_series([1.0, -1.0])


def test_check_values_allows_negative():
    np.testing.assert_array_equal(check_values([-1.0, 2.0]), [-1.0, 2.0])
    with pytest.raises(DataError):
        check_values([1.0, np.inf])


def test_check_int():
    assert check_int(np.int64(3), "n", 1) == 3
    with pytest.raises(TypeError):
        check_int(True, "n")
    with pytest.raises(ValueError):
        check_int(0, "n", 1)


def test_check_interval():
    assert check_interval([1, 2], "r") == (1.0, 2.0)
    with pytest.raises(ValueError):
        check_interval((2, 1), "r")
    with pytest.raises(ValueError):
        check_interval("ab", "r")
