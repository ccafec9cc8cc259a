"""Layered synthetic scenes and their ground-truth camera renders.

A scene is a stack of fronto-parallel segments in front of a far background
plane.  Segment x-ranges are half-open and expressed in pixel columns of the
rig origin (the camera at ``baseline_pos == 0``).  A camera at baseline ``b``
sees, in column ``c``, the point of a plane at depth ``z`` whose origin
column is ``c + round(f * b / z)``, i.e. the same integer shift the warper
applies, so warping a rendered view reproduces another render exactly
wherever nothing is disoccluded.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .core import CameraParams, GeometryError, View, check_rig, depth_encode
from .geometry import round_half_away

PALETTE = np.array(
    [
        (118, 128, 140),
        (220, 60, 50),
        (50, 170, 70),
        (60, 80, 220),
        (230, 200, 40),
        (190, 60, 200),
        (40, 200, 210),
        (240, 140, 30),
    ],
    dtype=np.int64,
)


class SceneError(ValueError):
    pass


@dataclass(frozen=True)
class Segment:
    row0: int
    row1: int
    x0: float
    x1: float
    z: float
    pattern: int

    def __post_init__(self):
        if self.row0 > self.row1 or self.row0 < 0:
            raise SceneError(f"bad row range {self.row0}-{self.row1}")
        if not self.x0 < self.x1:
            raise SceneError(f"bad x range [{self.x0}, {self.x1})")
        if self.z <= 0:
            raise SceneError("segment depth must be positive")


@dataclass(frozen=True)
class ScanlineScene:
    width: int
    height: int
    z_far: float
    segments: tuple[Segment, ...] = ()
    background_pattern: int = 0
    seed: int = 0

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise SceneError("scene needs a positive size")
        for s in self.segments:
            if s.z > self.z_far:
                raise SceneError(f"segment at z={s.z} lies behind the background plane")
            if s.row1 >= self.height:
                raise SceneError(f"segment rows {s.row0}-{s.row1} exceed height {self.height}")

    def row_segments(self, row: int) -> list[Segment]:
        return [s for s in self.segments if s.row0 <= row <= s.row1]

    def mirrored(self) -> "ScanlineScene":
        """Left-right mirror about the origin camera's image centre."""
        segs = tuple(
            replace(s, x0=self.width - s.x1, x1=self.width - s.x0) for s in self.segments
        )
        return replace(self, segments=segs)


def pattern_color(pattern, rows, p, seed: int = 0) -> np.ndarray:
    """Deterministic striped, noisy texture; ``pattern`` may be an id array.

    Colour depends only on the surface point (row, origin column), so every
    camera sees the same colour for the same point.
    """
    rows = np.asarray(rows, dtype=np.int64)
    p = np.asarray(p, dtype=np.int64)
    pattern = np.asarray(pattern, dtype=np.int64)
    base = PALETTE[pattern % len(PALETTE)]
    stripe = (((p // 3) + (rows // 5) + pattern) % 2) * 2 - 1
    h = (p * 73856093) ^ (rows * 19349663) ^ ((pattern + 1) * 83492791) ^ (seed * 2654435761)
    h &= 0xFFFFFF
    noise = np.stack([(h >> 16) & 255, (h >> 8) & 255, h & 255], axis=-1) - 128
    col = base + 55 * stripe[..., None] + (noise * 45) // 128
    return np.clip(col, 0, 255).astype(np.uint8)


def render_view(scene: ScanlineScene, cam: CameraParams) -> View:
    """Ground-truth render: nearest covering segment per pixel."""
    if scene.z_far > cam.z_far or any(s.z <= cam.z_near for s in scene.segments):
        raise SceneError(f"scene depths fall outside camera {cam.view_id}'s depth range")
    h, w = scene.height, scene.width
    f, b = cam.focal_length_px, cam.baseline_pos
    cols = np.arange(w, dtype=np.int64)

    zbuf = np.full((h, w), float(scene.z_far))
    pat = np.full((h, w), scene.background_pattern, dtype=np.int64)
    origin = np.broadcast_to(cols + round_half_away(f * b / scene.z_far), (h, w)).copy()

    # paint far to near; equal depths keep the later segment
    for s in sorted(scene.segments, key=lambda s: -s.z):
        p = cols + round_half_away(f * b / s.z)
        hit = (p >= s.x0) & (p < s.x1)
        r = slice(s.row0, s.row1 + 1)
        sel = np.zeros((h, w), dtype=bool)
        sel[r] = hit
        sel &= s.z <= zbuf
        zbuf[sel] = s.z
        pat[sel] = s.pattern
        origin[sel] = np.broadcast_to(p, (h, w))[sel]

    rows = np.arange(h)[:, None]
    tex = pattern_color(pat, rows, origin, scene.seed)
    return View(tex, depth_encode(zbuf, cam).astype(np.uint8).reshape(h, w), cam)


def render_ground_truth(scene: ScanlineScene, virtual_cam: CameraParams) -> View:
    """Reference image at the virtual viewpoint; never contains holes."""
    return render_view(scene, virtual_cam)


# --- constructors ----------------------------------------------------------


def _max_shift(rig: Sequence[CameraParams], z: float) -> int:
    return max(abs(round_half_away(c.focal_length_px * c.baseline_pos / z)) for c in rig)


def make_fbfb(
    l_bg: int,
    l_fg: int,
    z_fg: float,
    z_bg: float,
    rig: Sequence[CameraParams],
    width: Optional[int] = None,
    height: int = 1,
    mirror: bool = False,
    lead: int = 8,
) -> ScanlineScene:
    """Foreground, background gap of ``l_bg``, foreground of ``l_fg``, background.

    Lengths are as seen from the origin camera; two foreground segments at
    one depth keep their lengths in every view.  ``mirror=True`` gives the
    B-F-B-F layout.  ``lead`` is the length of the first foreground segment.
    """
    if not z_fg < z_bg:
        raise SceneError("foreground must be nearer than background")
    if l_bg < 1 or l_fg < 1 or lead < 1:
        raise SceneError("segment lengths must be positive")
    pad = 2 * max(_max_shift(rig, z_fg), _max_shift(rig, z_bg)) + 4
    need = 2 * pad + lead + l_bg + l_fg
    if width is None:
        width = need
    if width < need:
        raise SceneError(f"width {width} too small for the layout (needs {need})")
    x = pad + (width - need) // 2
    y1 = x + lead - 1
    segs = (
        Segment(0, height - 1, x, y1 + 1, z_fg, 1),
        Segment(0, height - 1, y1 + l_bg + 1, y1 + l_bg + l_fg + 1, z_fg, 2),
    )
    scene = ScanlineScene(width, height, z_bg, segs)
    return scene.mirrored() if mirror else scene


def fbfb_anchor(scene: ScanlineScene) -> int:
    """Origin-view column of the last pixel of the first foreground segment."""
    return int(scene.segments[0].x1) - 1


def make_bfb(
    l_fg: int,
    z_fg: float,
    z_bg: float,
    rig: Sequence[CameraParams],
    width: Optional[int] = None,
    height: int = 1,
) -> ScanlineScene:
    """One foreground segment of ``l_fg`` pixels in front of the background."""
    if not z_fg < z_bg:
        raise SceneError("foreground must be nearer than background")
    if l_fg < 1:
        raise SceneError("segment length must be positive")
    pad = 2 * max(_max_shift(rig, z_fg), _max_shift(rig, z_bg)) + 4
    need = 2 * pad + l_fg
    if width is None:
        width = need
    if width < need:
        raise SceneError(f"width {width} too small for the layout (needs {need})")
    x = pad + (width - need) // 2
    return ScanlineScene(width, height, z_bg, (Segment(0, height - 1, x, x + l_fg, z_fg, 1),))


# --- rigs for single-scanline experiments ---------------------------------

SCANLINE_FOCAL = 1000.0
SCANLINE_Z_NEAR = 25.0
SCANLINE_Z_FAR = 100.0
# quantized level 85 decodes to z = 50, twice as near as the background
SCANLINE_Z_FG = 50.0


def _scanline_cam(view_id: int, b: float) -> CameraParams:
    return CameraParams(view_id, SCANLINE_FOCAL, b, SCANLINE_Z_NEAR, SCANLINE_Z_FAR)


def scanline_interp_rig(dd_p: int, dd_s: int) -> dict[str, CameraParams]:
    """Cameras V (virtual), LP, RP, RC where the foreground/background
    disparity difference to V is ``dd_p`` for LP/RP and ``dd_s`` for RC."""
    return {
        "V": _scanline_cam(0, 0.0),
        "LP": _scanline_cam(1, -dd_p / 10),
        "RP": _scanline_cam(2, dd_p / 10),
        "RC": _scanline_cam(3, dd_s / 10),
    }


def scanline_extrap_rig(dd_p: int, dd_s: int) -> dict[str, CameraParams]:
    """Cameras V, P, C with V left of P and C beyond P on the right."""
    return {
        "V": _scanline_cam(0, 0.0),
        "P": _scanline_cam(1, dd_p / 10),
        "C": _scanline_cam(2, dd_s / 10),
    }


# --- multi-view presets ----------------------------------------------------


@dataclass(frozen=True)
class Preset:
    name: str
    scene: ScanlineScene
    rig: tuple[CameraParams, ...]
    target_id: int
    interp_primaries: tuple[int, int]
    interp_comps: tuple[int, ...]
    interp_extra_comps: tuple[int, ...]
    extrap_primary: int
    extrap_comps: tuple[int, ...]
    extrap_extra_comps: tuple[int, ...]

    def camera(self, view_id: int) -> CameraParams:
        for c in self.rig:
            if c.view_id == view_id:
                return c
        raise KeyError(view_id)

    @property
    def target(self) -> CameraParams:
        return self.camera(self.target_id)

    @property
    def reference_ids(self) -> list[int]:
        return [c.view_id for c in self.rig if c.view_id != self.target_id]


PRESET_FOCAL = 1000.0
PRESET_Z_FAR = 100.0
PRESET_STEP = 0.2  # baseline between neighbouring views
# background disparity per step is 2 px and each 8-bit level adds 0.1 px
PRESET_Z_NEAR = 1.0 / (25.5 / (PRESET_FOCAL * PRESET_STEP) + 1.0 / PRESET_Z_FAR)


def preset_depth(px_per_step: float) -> float:
    """Depth whose disparity between neighbouring preset views is ``px_per_step``."""
    return PRESET_FOCAL * PRESET_STEP / px_per_step


def preset_rig(n_views: int = 9) -> tuple[CameraParams, ...]:
    mid = n_views // 2
    return tuple(
        CameraParams(i, PRESET_FOCAL, (i - mid) * PRESET_STEP, PRESET_Z_NEAR, PRESET_Z_FAR)
        for i in range(n_views)
    )


def _posts(x: int, n: int, width: int, gap: int, rows: tuple[int, int], z: float, pattern: int):
    return [
        Segment(rows[0], rows[1], x + k * (width + gap), x + k * (width + gap) + width, z, pattern)
        for k in range(n)
    ]


def _preset(name: str, scene: ScanlineScene) -> Preset:
    return Preset(
        name=name,
        scene=scene,
        rig=preset_rig(),
        target_id=4,
        interp_primaries=(3, 5),
        interp_comps=(1, 7),
        interp_extra_comps=(0, 8),
        extrap_primary=5,
        extrap_comps=(6,),
        extrap_extra_comps=(7,),
    )


def preset_scene(name: str, width: int = 1920, height: int = 256, seed: int = 0) -> Preset:
    """Built-in scenes: ``fbfb``, ``bfbf``, ``bfb`` and ``multi``."""
    z_fg = preset_depth(6.0)
    rows = (height // 8, height - 1 - height // 8)
    if name in ("fbfb", "bfbf"):
        mid = width // 2
        segs = (
            Segment(rows[0], rows[1], mid - 200, mid, z_fg, 1),
            Segment(rows[0], rows[1], mid + 3, mid + 10, z_fg, 2),
        )
        scene = ScanlineScene(width, height, PRESET_Z_FAR, segs, seed=seed)
        return _preset(name, scene.mirrored() if name == "bfbf" else scene)
    if name == "bfb":
        mid = width // 2
        segs = (Segment(rows[0], rows[1], mid - 3, mid + 3, z_fg, 1),)
        return _preset(name, ScanlineScene(width, height, PRESET_Z_FAR, segs, seed=seed))
    if name == "multi":
        return _preset(name, _multi_scene(width, height, seed))
    raise SceneError(f"unknown preset {name!r}")


def _multi_scene(width: int, height: int, seed: int) -> ScanlineScene:
    sx = width / 1920.0
    band = (height // 8, height - 1 - height // 8)
    mid_band = (height // 4, height - 1 - height // 4)
    segs: list[Segment] = []
    # picket fences at three depths
    segs += _posts(int(180 * sx), 10, 7, 3, band, preset_depth(6.0), 1)
    segs += _posts(int(560 * sx), 8, 9, 4, band, preset_depth(8.0), 2)
    segs += _posts(int(950 * sx), 9, 6, 5, mid_band, preset_depth(10.0), 3)
    # a solid box with a nearer bar in front of it
    segs.append(Segment(mid_band[0], mid_band[1], int(1350 * sx), int(1520 * sx), preset_depth(5.0), 4))
    segs += _posts(int(1400 * sx), 4, 5, 6, band, preset_depth(9.0), 5)
    # two narrow objects
    segs.append(Segment(band[0], band[1], int(1650 * sx), int(1662 * sx), preset_depth(7.0), 6))
    segs.append(Segment(band[0], band[1], int(1667 * sx), int(1672 * sx), preset_depth(7.0), 7))
    return ScanlineScene(width, height, PRESET_Z_FAR, tuple(segs), seed=seed)


PRESETS = ("fbfb", "bfbf", "bfb", "multi")


# --- scene text format -----------------------------------------------------

_SEG_LINE = re.compile(r"^(\d+)-(\d+)\s+(\S+)\s+(\S+)\s+(\S+)\s+(\d+)$")


def parse_scene(text: str) -> ScanlineScene:
    """Parse the plain-text scene format.

    Directives: ``size W H``, ``background Z [PATTERN]``, ``seed N``.  Every
    other non-comment line is a segment ``ROW0-ROW1 X0 X1 Z PATTERN``.
    """
    size = bg = None
    pattern, seed = 0, 0
    segs = []
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0] == "size" and len(parts) == 3:
                size = int(parts[1]), int(parts[2])
            elif parts[0] == "background" and len(parts) in (2, 3):
                bg = float(parts[1])
                pattern = int(parts[2]) if len(parts) == 3 else 0
            elif parts[0] == "seed" and len(parts) == 2:
                seed = int(parts[1])
            else:
                m = _SEG_LINE.match(line)
                if not m:
                    raise SceneError("expected 'ROW0-ROW1 X0 X1 Z PATTERN'")
                r0, r1, x0, x1, z, pid = m.groups()
                segs.append(Segment(int(r0), int(r1), float(x0), float(x1), float(z), int(pid)))
        except ValueError as e:
            raise SceneError(f"line {n}: {e}") from None
    if size is None or bg is None:
        raise SceneError("scene needs 'size' and 'background' lines")
    return ScanlineScene(size[0], size[1], bg, tuple(segs), pattern, seed)


def format_scene(scene: ScanlineScene) -> str:
    lines = [
        f"size {scene.width} {scene.height}",
        f"background {scene.z_far!r} {scene.background_pattern}",
        f"seed {scene.seed}",
    ]
    for s in scene.segments:
        lines.append(f"{s.row0}-{s.row1} {s.x0!r} {s.x1!r} {s.z!r} {s.pattern}")
    return "\n".join(lines) + "\n"


def load_scene(path) -> ScanlineScene:
    return parse_scene(Path(path).read_text())


def render_rig(scene: ScanlineScene, rig: Sequence[CameraParams]) -> dict[int, View]:
    check_rig(rig)
    return {c.view_id: render_view(scene, c) for c in rig}
