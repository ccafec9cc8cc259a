"""Shared image, depth and camera types.

Textures are ``(H, W, 3)`` uint8 arrays and depth maps are ``(H, W)`` uint8
arrays of quantized inverse depth (255 = nearest, 0 = farthest).  Warped
views carry a float z-buffer in which hole pixels hold :data:`EMPTY`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

#: z-buffer value of a pixel that received no sample.  Compares farther than
#: any real depth, so it never wins a z-test.
EMPTY = np.inf


class GeometryError(ValueError):
    """Invalid camera, image geometry, or margin."""


@dataclass(frozen=True)
class CameraParams:
    view_id: int
    focal_length_px: float
    baseline_pos: float
    z_near: float
    z_far: float

    def __post_init__(self):
        if not self.focal_length_px > 0:
            raise GeometryError(f"view {self.view_id}: focal length must be positive")
        if not 0 < self.z_near < self.z_far:
            raise GeometryError(f"view {self.view_id}: need 0 < z_near < z_far")


def check_rig(cams) -> None:
    """Raise unless all cameras share one focal length and have unique ids."""
    cams = list(cams)
    ids = [c.view_id for c in cams]
    if len(set(ids)) != len(ids):
        raise GeometryError(f"duplicate view ids in rig: {ids}")
    focals = {c.focal_length_px for c in cams}
    if len(focals) > 1:
        raise GeometryError(f"rig is not parallel: focal lengths {sorted(focals)}")


def depth_decode(v, cam: CameraParams):
    """Map 8-bit inverse-depth samples to metric depth.

    ``1/z = (v/255) * (1/z_near - 1/z_far) + 1/z_far``; works on scalars and
    arrays alike.
    """
    v = np.asarray(v, dtype=np.float64)
    inv = (v / 255.0) * (1.0 / cam.z_near - 1.0 / cam.z_far) + 1.0 / cam.z_far
    z = 1.0 / inv
    # pin the endpoints against rounding drift so z stays in [z_near, z_far]
    z = np.clip(z, cam.z_near, cam.z_far)
    return z if z.ndim else float(z)


def depth_encode(z, cam: CameraParams):
    """Inverse of :func:`depth_decode`, rounded to the nearest 8-bit level."""
    z = np.asarray(z, dtype=np.float64)
    span = 1.0 / cam.z_near - 1.0 / cam.z_far
    v = np.floor(255.0 * (1.0 / z - 1.0 / cam.z_far) / span + 0.5)
    v = np.clip(v, 0, 255).astype(np.uint8)
    return v if v.ndim else int(v)


@dataclass(frozen=True)
class View:
    """Texture, quantized depth, and camera of one reference viewpoint."""

    texture: np.ndarray
    depth: np.ndarray
    camera: CameraParams

    def __post_init__(self):
        tex, dep = self.texture, self.depth
        if tex.ndim != 3 or tex.shape[2] != 3 or tex.dtype != np.uint8:
            raise GeometryError("texture must be an (H, W, 3) uint8 array")
        if dep.ndim != 2 or dep.dtype != np.uint8:
            raise GeometryError("depth must be an (H, W) uint8 array")
        if tex.shape[:2] != dep.shape:
            raise GeometryError(
                f"texture {tex.shape[:2]} and depth {dep.shape} dimensions differ"
            )
        if dep.shape[0] < 1 or dep.shape[1] < 1:
            raise GeometryError("empty image")
        tex.setflags(write=False)
        dep.setflags(write=False)

    @property
    def shape(self) -> tuple[int, int]:
        return self.depth.shape

    def metric_depth(self) -> np.ndarray:
        return depth_decode(self.depth, self.camera)


@dataclass(frozen=True)
class WarpedView:
    """A texture and metric z-buffer at the target viewpoint.

    ``source_col`` records, for every written pixel, the source column it came
    from (-1 for holes); ``source_view`` does the same for the view id.  Both
    are provenance only and play no part in the synthesis itself.
    """

    texture: np.ndarray
    zbuffer: np.ndarray
    z_near: float
    z_far: float
    source_col: Optional[np.ndarray] = field(default=None, compare=False)
    source_view: Optional[np.ndarray] = field(default=None, compare=False)

    def __post_init__(self):
        if self.texture.shape[:2] != self.zbuffer.shape:
            raise GeometryError("texture and z-buffer dimensions differ")
        for a in (self.texture, self.zbuffer, self.source_col, self.source_view):
            if a is not None:
                a.setflags(write=False)

    @property
    def hole_mask(self) -> np.ndarray:
        return self.zbuffer == EMPTY

    @property
    def shape(self) -> tuple[int, int]:
        return self.zbuffer.shape

    def as_view_texture(self, fill=(0, 0, 0)) -> np.ndarray:
        """Texture copy with holes painted ``fill``."""
        out = self.texture.copy()
        out[self.hole_mask] = fill
        return out

    @classmethod
    def from_view(cls, view: View) -> "WarpedView":
        """Wrap an unwarped view (no holes)."""
        h, w = view.shape
        cols = np.broadcast_to(np.arange(w, dtype=np.int64), (h, w)).copy()
        ids = np.full((h, w), view.camera.view_id, dtype=np.int64)
        return cls(
            view.texture.copy(),
            view.metric_depth(),
            view.camera.z_near,
            view.camera.z_far,
            cols,
            ids,
        )


@dataclass(frozen=True, order=True)
class HoleRun:
    """Maximal horizontal run of hole pixels, columns inclusive."""

    row: int
    start_col: int
    end_col: int

    def __post_init__(self):
        if self.start_col > self.end_col:
            raise GeometryError(f"empty run {self}")

    @property
    def length(self) -> int:
        return self.end_col - self.start_col + 1


def margin_window(shape: tuple[int, int], margin: int) -> tuple[slice, slice]:
    """Row and column slices of the evaluation window inside ``margin``."""
    h, w = shape
    if margin < 0:
        raise GeometryError("margin must be non-negative")
    if 2 * margin >= w or 2 * margin >= h:
        raise GeometryError(f"margin {margin} too large for {w}x{h} image")
    return slice(margin, h - margin), slice(margin, w - margin)


def runs_in_row(mask_row: np.ndarray) -> list[tuple[int, int]]:
    """Inclusive (start, end) column pairs of the True runs in a 1-D mask."""
    m = np.asarray(mask_row, dtype=np.int8)
    if not m.any():
        return []
    d = np.diff(np.concatenate(([0], m, [0])))
    starts = np.flatnonzero(d == 1)
    ends = np.flatnonzero(d == -1) - 1
    return list(zip(starts.tolist(), ends.tolist()))


def extract_hole_runs(view, margin: int = 0) -> list[HoleRun]:
    """All maximal hole runs clipped to the margin window, sorted by row/column.

    ``view`` may be a :class:`WarpedView` or a bare boolean hole mask.
    """
    mask = view.hole_mask if isinstance(view, WarpedView) else np.asarray(view, bool)
    rows, cols = margin_window(mask.shape, margin)
    out = []
    for r in range(rows.start, rows.stop):
        for s, e in runs_in_row(mask[r, cols]):
            out.append(HoleRun(r, s + cols.start, e + cols.start))
    return out
