"""
Test suite for FRBE laboratory - CSV Output
"""
import numpy as np
import pandas as pd
import pytest
import sys
import os

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from utils.data_processing import DataProcessor, format_float


class TestFormatFloat:
    """Tests for the 17-digit float format."""

    @pytest.mark.parametrize("value, text", [
        (0.1353352832366127, "0.13533528323661270"),
        (0.1, "0.10000000000000001"),
        (1.0, "1"),
        (-2.0, "-2"),
        (0.0, "0"),
        (0.5, "0.5"),
        (-2.5, "-2.5"),
        (2.0 ** -70, "8.4703294725430034e-22"),
    ])
    def test_values(self, value, text):
        """Exact short values print as they are; others keep 17 digits with trailing zeros."""
        assert format_float(value) == text

    def test_round_trip(self):
        """17 significant digits recover the double exactly."""
        rng = np.random.default_rng(3)
        for value in rng.normal(size=50):
            assert float(format_float(value)) == value

    def test_nan(self):
        """Missing values are written as nan."""
        assert format_float(float("nan")) == "nan"


class TestDataProcessor:
    """Tests for CSV emission."""

    def test_csv_text(self):
        """Header, LF line endings, formatted floats and untouched labels."""
        frame = pd.DataFrame({
            "function": ["mittag_leffler", "gamma"],
            "argument": [-2.0, 0.0],
            "value": [0.1353352832366127, np.nan],
        })
        text = DataProcessor.to_csv_text(frame)
        assert text == "function,argument,value\nmittag_leffler,-2,0.13533528323661270\ngamma,0,nan\n"

    def test_frame_not_modified(self):
        """Formatting works on a copy."""
        frame = pd.DataFrame({"x": [0.5]})
        DataProcessor.to_csv_text(frame)
        assert frame["x"].dtype == np.float64

    def test_failed_rows(self):
        """Rows with any NaN count as failed."""
        frame = pd.DataFrame({"a": [1.0, np.nan, 2.0], "b": [np.nan, 1.0, 3.0]})
        assert DataProcessor.count_failed_rows(frame) == 2
