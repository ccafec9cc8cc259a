"""Blend two warped primary views into one merged view."""

from __future__ import annotations

from typing import Optional

import numpy as np

from .core import EMPTY, GeometryError, WarpedView


def baseline_weight(left_pos: float, right_pos: float, target_pos: float) -> float:
    """Weight of the left view: the farther reference gets the smaller share."""
    dl = abs(target_pos - left_pos)
    dr = abs(right_pos - target_pos)
    if dl + dr == 0:
        return 0.5
    return dr / (dl + dr)


def merge(
    left: WarpedView,
    right: WarpedView,
    w_left: float = 0.5,
    depth_blend_threshold: Optional[float] = None,
) -> WarpedView:
    """Per-pixel merge of two warped views.

    Where only one view has a sample it is copied.  Where both do, samples
    within ``depth_blend_threshold`` of each other are blended with weight
    ``w_left`` and otherwise the nearer one is kept.  The threshold defaults
    to 2% of the combined depth range.
    """
    if left.shape != right.shape:
        raise GeometryError(f"cannot merge {left.shape} with {right.shape}")
    if not 0.0 <= w_left <= 1.0:
        raise ValueError("w_left must lie in [0, 1]")
    z_near = min(left.z_near, right.z_near)
    z_far = max(left.z_far, right.z_far)
    if depth_blend_threshold is None:
        depth_blend_threshold = 0.02 * (z_far - z_near)

    zl, zr = left.zbuffer, right.zbuffer
    hl, hr = zl == EMPTY, zr == EMPTY
    both = ~hl & ~hr
    with np.errstate(invalid="ignore"):
        close = both & (np.abs(zl - zr) <= depth_blend_threshold)
    take_left = (~hl & hr) | (both & ~close & (zl <= zr))
    take_right = (hl & ~hr) | (both & ~close & (zr < zl))

    tex = np.zeros_like(left.texture)
    tex[take_left] = left.texture[take_left]
    tex[take_right] = right.texture[take_right]
    mix = w_left * left.texture[close].astype(np.float64) + (1.0 - w_left) * right.texture[
        close
    ].astype(np.float64)
    tex[close] = np.floor(mix + 0.5).astype(np.uint8)

    z = np.full(zl.shape, EMPTY)
    z[take_left] = zl[take_left]
    z[take_right] = zr[take_right]
    z[close] = np.minimum(zl[close], zr[close])

    col, vid = _merge_provenance(left, right, take_left | (close & (zl <= zr)), take_right | (close & (zr < zl)))
    return WarpedView(tex, z, z_near, z_far, col, vid)


def _merge_provenance(left, right, from_left, from_right):
    if left.source_col is None or right.source_col is None:
        return None, None
    col = np.full(left.shape, -1, dtype=np.int64)
    vid = np.full(left.shape, -1, dtype=np.int64)
    col[from_left] = left.source_col[from_left]
    vid[from_left] = left.source_view[from_left]
    col[from_right] = right.source_col[from_right]
    vid[from_right] = right.source_view[from_right]
    return col, vid
