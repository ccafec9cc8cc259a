"""Scanline forward warping with z-buffer occlusion handling."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core import EMPTY, View, WarpedView
from .geometry import shift_px

# per-row list of inclusive source column intervals
ColumnFilter = Sequence[Sequence[tuple[int, int]]]


@dataclass(frozen=True)
class WarpRequest:
    source: View
    target_baseline_pos: float
    column_filter: Optional[ColumnFilter] = None

    def __post_init__(self):
        if self.column_filter is None:
            return
        h, w = self.source.shape
        if len(self.column_filter) != h:
            raise ValueError(f"column filter has {len(self.column_filter)} rows, image has {h}")
        for r, ivs in enumerate(self.column_filter):
            for a, b in ivs:
                if not 0 <= a <= b < w:
                    raise ValueError(f"row {r}: filter interval ({a}, {b}) outside [0, {w - 1}]")


def filter_mask(column_filter: ColumnFilter, shape: tuple[int, int]) -> np.ndarray:
    mask = np.zeros(shape, dtype=bool)
    for r, ivs in enumerate(column_filter):
        for a, b in ivs:
            mask[r, a : b + 1] = True
    return mask


def warp_pixels(
    texture: np.ndarray,
    z: np.ndarray,
    dx: np.ndarray,
    select: Optional[np.ndarray] = None,
    view_id: int = -1,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Splat every selected pixel to ``col + dx`` with nearest-depth-wins.

    Equal depths go to the lower source column.  Returns target texture,
    z-buffer (``EMPTY`` for holes), source-column map and source-view map.
    """
    h, w = z.shape
    rows, cols = np.indices((h, w))
    tcols = cols + dx
    keep = (tcols >= 0) & (tcols < w)
    if select is not None:
        keep &= select
    r, c, t, zz = rows[keep], cols[keep], tcols[keep], z[keep]

    # winner per target pixel = first entry after sorting by (row, tcol, z, col)
    order = np.lexsort((c, zz, t, r))
    r, c, t, zz = r[order], c[order], t[order], zz[order]
    first = np.ones(len(r), dtype=bool)
    first[1:] = (r[1:] != r[:-1]) | (t[1:] != t[:-1])
    r, c, t, zz = r[first], c[first], t[first], zz[first]

    out_tex = np.zeros_like(texture)
    out_z = np.full((h, w), EMPTY)
    out_col = np.full((h, w), -1, dtype=np.int64)
    out_id = np.full((h, w), -1, dtype=np.int64)
    out_tex[r, t] = texture[r, c]
    out_z[r, t] = zz
    out_col[r, t] = c
    out_id[r, t] = view_id
    return out_tex, out_z, out_col, out_id


def forward_warp(req: WarpRequest) -> WarpedView:
    """Warp ``req.source`` to ``req.target_baseline_pos``.

    Pixels landing outside the image are dropped; unwritten pixels are holes.
    """
    src = req.source
    cam = src.camera
    z = src.metric_depth()
    dx = shift_px(z, cam.focal_length_px, cam.baseline_pos, req.target_baseline_pos)
    select = None
    if req.column_filter is not None:
        select = filter_mask(req.column_filter, src.shape)
    tex, zb, col, vid = warp_pixels(src.texture, z, dx, select, cam.view_id)
    return WarpedView(tex, zb, cam.z_near, cam.z_far, col, vid)


def backward_map(col: int, z: float, from_baseline: float, to_baseline: float, f: float) -> int:
    """Column in the view at ``to_baseline`` whose sample warps onto ``col``.

    ``col`` lives in the view at ``from_baseline`` (the warp target); the
    returned column is in the source view at ``to_baseline``.  Exact inverse of
    the forward warp at depth ``z``.
    """
    if z <= 0:
        raise ValueError("depth must be positive")
    return int(col - shift_px(z, f, to_baseline, from_baseline))


__all__ = [
    "WarpRequest",
    "forward_warp",
    "backward_map",
    "warp_pixels",
    "filter_mask",
]
