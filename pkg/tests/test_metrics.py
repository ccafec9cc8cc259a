import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mvsynth.core import GeometryError
from mvsynth.metrics import (
    PSNR_IDENTICAL,
    REPORT_HEADER,
    ReportRow,
    format_csv,
    hole_count,
    parse_csv,
    psnr_masked,
    reduction_pct,
    window_mask,
)


def test_hole_count_margin_window():
    assert hole_count(np.ones((200, 200), bool), margin=60) == 80 * 80 == 6400
    assert hole_count(np.ones((200, 200), bool), margin=0) == 40000


def test_hole_count_ignores_border_holes():
    m = np.zeros((10, 10), bool)
    m[0, :] = True
    m[:, 9] = True
    m[5, 5] = True
    assert hole_count(m, margin=1) == 1


def test_margin_must_leave_a_window():
    with pytest.raises(GeometryError):
        hole_count(np.ones((100, 200), bool), margin=50)


def test_window_mask_matches_count():
    m = window_mask((12, 20), 3)
    assert m.sum() == 6 * 14
    assert hole_count(m, 3) == m.sum()


@pytest.mark.parametrize(
    "before,after,expected",
    [(100, 25, 75.0), (877, 96, 100 * 781 / 877), (0, 0, 0.0), (10, 10, 0.0), (5, 0, 100.0)],
)
def test_reduction_pct(before, after, expected):
    assert reduction_pct(before, after) == pytest.approx(expected)


def test_reduction_rejects_growth():
    with pytest.raises(ValueError):
        reduction_pct(5, 6)


def test_psnr_single_channel_error():
    a = np.zeros((1, 1, 3), np.uint8)
    b = a.copy()
    b[0, 0, 0] = 255
    # MSE = 255^2 / 3
    assert psnr_masked(a, b, np.ones((1, 1), bool)) == pytest.approx(10 * math.log10(3))
    assert psnr_masked(a, b, np.ones((1, 1), bool)) == pytest.approx(4.7712, abs=1e-4)


def test_psnr_two_pixels():
    a = np.zeros((1, 3, 3), np.uint8)
    b = a.copy()
    b[0, 0, 1] = 255
    b[0, 2] = 255  # outside the mask
    mask = np.array([[True, True, False]])
    # MSE = 255^2 / 6
    assert psnr_masked(a, b, mask) == pytest.approx(10 * math.log10(6))


def test_psnr_identical_is_infinite():
    a = np.full((4, 4, 3), 77, np.uint8)
    assert psnr_masked(a, a, np.ones((4, 4), bool)) == PSNR_IDENTICAL == math.inf


def test_psnr_errors():
    a = np.zeros((2, 2, 3), np.uint8)
    with pytest.raises(ValueError):
        psnr_masked(a, a, np.zeros((2, 2), bool))
    with pytest.raises(ValueError):
        psnr_masked(a, np.zeros((2, 3, 3), np.uint8), np.ones((2, 2), bool))


def test_psnr_luma():
    a = np.zeros((1, 1, 3), np.uint8)
    b = np.array([[[0, 0, 255]]], np.uint8)
    expected = 10 * math.log10(255**2 / (0.114 * 255) ** 2)
    assert psnr_masked(a, b, np.ones((1, 1), bool), luma=True) == pytest.approx(expected)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 40))
def test_psnr_decreases_with_error(seed, step):
    rng = np.random.default_rng(seed)
    a = rng.integers(60, 190, (3, 4, 3)).astype(np.uint8)
    mask = np.ones((3, 4), bool)
    small = (a.astype(int) + 1).astype(np.uint8)
    big = (a.astype(int) + 1 + step).astype(np.uint8)
    assert psnr_masked(a, big, mask) < psnr_masked(a, small, mask)


def test_csv_round_trip():
    rows = [
        ReportRow("2PV", 877, 877, 0.0, None, 100),
        ReportRow("2PV+2CV", 877, 96, 89.0547, math.inf, 300),
        ReportRow("2PV+Inpainting", 877, 0, 100.0, 12.5, 200),
    ]
    text = format_csv(rows)
    assert text.splitlines()[0].split(",") == REPORT_HEADER
    assert parse_csv(text) == rows


def test_csv_rejects_unknown_header():
    with pytest.raises(ValueError):
        parse_csv("a,b\n1,2\n")


def test_format_line():
    line = ReportRow("PV+CV", 10, 4, 60.0, None, 12).format_line()
    assert line == "PV+CV: holes 10 -> 4 (60.00% reduction), filled PSNR n/a, warped 12 px"
