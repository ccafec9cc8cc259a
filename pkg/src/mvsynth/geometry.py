"""Disparity and closed-form scanline hole prediction.

The predictors work on one scanline with uniform foreground and background
depths.  All positions are relative: interpolation is anchored at the warped
right edge of the left foreground object (``y1 = 0``), extrapolation at the
warped left edge of the foreground object (``y2 = 0``).  Intervals are
inclusive integer ``(start, end)`` tuples, ``None`` when empty.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

Interval = Optional[tuple[int, int]]


def round_half_away(x):
    """Nearest integer, ties away from zero. Scalar or array."""
    if isinstance(x, (int, float)):
        return int(math.floor(x + 0.5)) if x >= 0 else int(math.ceil(x - 0.5))
    x = np.asarray(x, dtype=np.float64)
    r = np.where(x >= 0, np.floor(x + 0.5), np.ceil(x - 0.5)).astype(np.int64)
    return r if r.ndim else int(r)


def disparity(z, f: float, l: float):
    """Horizontal disparity ``f * l / z`` in pixels."""
    z = np.asarray(z, dtype=np.float64)
    if np.any(z <= 0):
        raise ValueError("depth must be positive")
    if f <= 0:
        raise ValueError("focal length must be positive")
    d = f * l / z
    return d if d.ndim else float(d)


def shift_px(z, f: float, from_baseline: float, to_baseline: float):
    """Integer column offset added to a pixel warped between two baselines.

    A pixel at column ``x`` in the view at ``from_baseline`` lands at
    ``x + shift_px(...)`` in the view at ``to_baseline``.  The disparity is
    rounded (half away from zero) before it is applied, so mirrored warps
    produce mirrored offsets.
    """
    return -round_half_away(disparity(z, f, to_baseline - from_baseline))


def _interval(a: int, b: int) -> Interval:
    return (a, b) if a <= b else None


@dataclass(frozen=True)
class PredictionInput:
    l_fg: int
    dd_p: float
    dd_s: float
    l_bg: Optional[int] = None

    def __post_init__(self):
        if self.l_fg < 1:
            raise ValueError("l_fg must be a positive integer")
        if self.l_bg is not None and self.l_bg < 1:
            raise ValueError("l_bg must be a positive integer")
        if self.dd_p <= 0 or self.dd_s <= 0:
            raise ValueError("disparity differences must be positive")


@dataclass(frozen=True)
class HolePrediction:
    conventional: Interval
    with_complementary: Interval

    @property
    def eliminated(self) -> bool:
        """True when no hole is left after complementary assistance."""
        return self.with_complementary is None

    @staticmethod
    def width(iv: Interval) -> int:
        return 0 if iv is None else iv[1] - iv[0] + 1


@dataclass(frozen=True)
class InterpolationPoints:
    """Warped boundary locations for the LP/RP/RC setting, ``y1 = 0``."""

    y1: int
    y4: int
    y5: int
    y2_lp: int
    y3_lp: int
    y6_lp: int
    y2_rp: int
    y3_rp: int
    y6_rp: int
    y2_rc: int
    y3_rc: int
    y6_rc: int


def interpolation_points(l_bg: int, l_fg: int, dd_p: int, dd_s: int) -> InterpolationPoints:
    y1 = 0
    return InterpolationPoints(
        y1=y1,
        y4=y1 + l_bg + 1,
        y5=y1 + l_bg + l_fg,
        y2_lp=y1 + 1 + dd_p,
        y3_lp=y1 + l_bg + dd_p,
        y6_lp=y1 + l_bg + l_fg + 1 + dd_p,
        y2_rp=y1 + 1 - dd_p,
        y3_rp=y1 + l_bg - dd_p,
        y6_rp=y1 + l_bg + l_fg + 1 - dd_p,
        y2_rc=y1 + 1 - dd_s,
        y3_rc=y1 + l_bg - dd_s,
        y6_rc=y1 + l_bg + l_fg + 1 - dd_s,
    )


def _as_int(x: float, name: str) -> int:
    if x != math.floor(x):
        raise ValueError(f"{name} must be integral for pixel-exact prediction, got {x}")
    return int(x)


def predict_interpolation_hole(inp: PredictionInput) -> HolePrediction:
    """Merged-view hole between two foreground objects (F-B-F-B layout).

    The conventional hole is what survives merging the left and right primary
    warps; the right complementary view's far background segment then pushes
    the hole's right end leftwards.  Mirror the scanline for B-F-B-F.
    """
    if inp.l_bg is None:
        raise ValueError("interpolation needs l_bg")
    dd_p = _as_int(inp.dd_p, "dd_p")
    dd_s = _as_int(inp.dd_s, "dd_s")
    p = interpolation_points(inp.l_bg, inp.l_fg, dd_p, dd_s)
    start = max(p.y3_rp + 1, p.y1 + 1)
    conventional = _interval(start, min(p.y2_lp - 1, p.y4 - 1, p.y6_rp - 1))
    if conventional is None:
        return HolePrediction(None, None)
    reduced = _interval(start, min(p.y2_lp - 1, p.y4 - 1, p.y6_rp - 1, p.y6_rc - 1))
    return HolePrediction(conventional, reduced)


@dataclass(frozen=True)
class ExtrapolationPoints:
    """Warped boundary locations for the P/C setting, ``y2 = 0``.

    Background samples move left of the foreground by the disparity
    difference in both views; ``y1`` is the warped last background pixel
    left of the object and ``y4`` the warped first background pixel right
    of it.
    """

    y2: int
    y3: int
    y1_p: int
    y4_p: int
    y1_c: int
    y4_c: int


def extrapolation_points(l_fg: int, dd_p: int, dd_s: int) -> ExtrapolationPoints:
    y2 = 0
    return ExtrapolationPoints(
        y2=y2,
        y3=y2 + l_fg - 1,
        y1_p=y2 - 1 - dd_p,
        y4_p=y2 + l_fg - dd_p,
        y1_c=y2 - 1 - dd_s,
        y4_c=y2 + l_fg - dd_s,
    )


def extrapolation_intervals(l_fg: int, dd_p: int, dd_s: int) -> tuple[Interval, Interval]:
    """Conventional and reduced extrapolation hole, no ordering precondition."""
    p = extrapolation_points(l_fg, dd_p, dd_s)
    start = p.y1_p + 1
    end = min(p.y4_p - 1, p.y2 - 1)
    conventional = _interval(start, end)
    if conventional is None:
        return None, None
    return conventional, _interval(start, min(end, p.y4_c - 1))


def predict_extrapolation_hole(inp: PredictionInput) -> HolePrediction:
    """Hole left of a single foreground object (B-F-B) when extrapolating.

    The virtual view lies on the far side of the primary from the
    complementary view, so background moves left relative to the object in
    both warps and the complementary view's right background can cover part
    of the hole.
    """
    if inp.dd_s <= inp.dd_p:
        raise ValueError("complementary view must be farther than the primary (dd_s > dd_p)")
    conv, red = extrapolation_intervals(
        inp.l_fg, _as_int(inp.dd_p, "dd_p"), _as_int(inp.dd_s, "dd_s")
    )
    return HolePrediction(conv, red)
