"""Hole reduction with complementary reference views.

Complementary views never blend into existing samples: they only write hole
pixels of the base view, nearest depth first, earlier views winning ties.
``fill_selective`` warps only the few background columns of each
complementary view that can land in a hole, located by mapping one hole edge
back into the complementary view at the estimated background depth.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .core import EMPTY, HoleRun, View, WarpedView, extract_hole_runs, runs_in_row
from .warper import WarpRequest, backward_map, filter_mask, forward_warp

LEFT = "left"
RIGHT = "right"

DEFAULT_EXTRA_PIXELS = 2
DEFAULT_SEARCH_WINDOW = 32
DEFAULT_DISCONTINUITY = 0.10


class FillError(ValueError):
    pass


@dataclass(frozen=True)
class SelectivePlan:
    run: HoleRun
    z_bg: float
    side: str
    view_id: int
    src_start: int
    src_end: int

    @property
    def length(self) -> int:
        return self.src_end - self.src_start + 1


@dataclass
class FillReport:
    filled_mask: np.ndarray
    run_fill_counts: list[int]
    cost: int
    plans: list[SelectivePlan] = field(default_factory=list)

    @property
    def filled(self) -> int:
        return int(self.filled_mask.sum())


def _write_candidates(base: WarpedView, warps: Sequence[WarpedView]):
    """Fill base holes from candidate warps, nearest depth wins, earlier view on ties."""
    holes = base.hole_mask
    tex = base.texture.copy()
    z = base.zbuffer.copy()
    col = None if base.source_col is None else base.source_col.copy()
    vid = None if base.source_view is None else base.source_view.copy()
    for w in warps:
        take = holes & (w.zbuffer < z)
        tex[take] = w.texture[take]
        z[take] = w.zbuffer[take]
        if col is not None and w.source_col is not None:
            col[take] = w.source_col[take]
            vid[take] = w.source_view[take]
    filled = holes & (z != EMPTY)
    return WarpedView(tex, z, base.z_near, base.z_far, col, vid), filled


def _run_counts(runs: Sequence[HoleRun], filled: np.ndarray) -> list[int]:
    return [int(filled[r.row, r.start_col : r.end_col + 1].sum()) for r in runs]


def fill_full(base: WarpedView, comps: Sequence[View], target_baseline_pos: float):
    """Warp every complementary view in full and fill base holes from them."""
    if not comps:
        raise FillError("at least one complementary view is required")
    warps = [forward_warp(WarpRequest(c, target_baseline_pos)) for c in comps]
    out, filled = _write_candidates(base, warps)
    cost = sum(c.shape[0] * c.shape[1] for c in comps)
    runs = extract_hole_runs(base)
    return out, FillReport(filled, _run_counts(runs, filled), cost)


def estimate_background_depth(
    view: WarpedView,
    run: HoleRun,
    discontinuity_threshold: Optional[float] = None,
    window: int = DEFAULT_SEARCH_WINDOW,
) -> tuple[float, str]:
    """Background depth and side for one hole run.

    The farther of the two flanking samples is background.  When both flanks
    lie within ``discontinuity_threshold`` of each other (default 10% of the
    view's depth range) neither can be told apart, and the farthest sample
    within ``window`` columns on either side is used instead.
    """
    z = view.zbuffer[run.row]
    w = z.shape[0]
    if discontinuity_threshold is None:
        discontinuity_threshold = DEFAULT_DISCONTINUITY * (view.z_far - view.z_near)
    left = run.start_col - 1
    right = run.end_col + 1
    has_l = left >= 0 and z[left] != EMPTY
    has_r = right < w and z[right] != EMPTY
    if not has_l and not has_r:
        raise FillError(f"hole run {run} has no neighbouring samples")
    if has_l and not has_r:
        return float(z[left]), LEFT
    if has_r and not has_l:
        return float(z[right]), RIGHT
    if abs(z[left] - z[right]) > discontinuity_threshold:
        return (float(z[left]), LEFT) if z[left] > z[right] else (float(z[right]), RIGHT)

    best = None
    for dist in range(1, window + 1):
        for c, side in ((run.start_col - dist, LEFT), (run.end_col + dist, RIGHT)):
            if 0 <= c < w and z[c] != EMPTY and (best is None or z[c] > best[0]):
                best = (float(z[c]), side)
    return best


def plan_selective(
    view: WarpedView,
    runs: Sequence[HoleRun],
    comp: View,
    target_baseline_pos: float,
    extra_pixels: int = DEFAULT_EXTRA_PIXELS,
) -> list[SelectivePlan]:
    """Source column interval of ``comp`` to warp for each hole run.

    The hole edge on the background side is mapped into ``comp`` at the
    estimated background depth; the interval starts there and extends across
    the hole's span plus ``extra_pixels``.  Runs whose interval falls wholly
    outside ``comp`` are skipped.
    """
    cam = comp.camera
    w = comp.shape[1]
    plans = []
    for run in runs:
        z_bg, side = estimate_background_depth(view, run)
        n = run.length + extra_pixels
        if side == LEFT:
            c0 = backward_map(run.start_col, z_bg, target_baseline_pos, cam.baseline_pos, cam.focal_length_px)
            a, b = c0, c0 + n - 1
        else:
            c0 = backward_map(run.end_col, z_bg, target_baseline_pos, cam.baseline_pos, cam.focal_length_px)
            a, b = c0 - n + 1, c0
        a, b = max(a, 0), min(b, w - 1)
        if a > b:
            continue
        plans.append(SelectivePlan(run, z_bg, side, cam.view_id, a, b))
    return plans


def _plan_filter(plans: Sequence[SelectivePlan], height: int) -> list[list[tuple[int, int]]]:
    rows: list[list[tuple[int, int]]] = [[] for _ in range(height)]
    for p in plans:
        rows[p.run.row].append((p.src_start, p.src_end))
    return rows


def fill_selective(
    base: WarpedView,
    comps: Sequence[View],
    target_baseline_pos: float,
    extra_pixels: int = DEFAULT_EXTRA_PIXELS,
):
    """Fill base holes by warping only the planned columns of each view."""
    if not comps:
        raise FillError("at least one complementary view is required")
    runs = extract_hole_runs(base)
    if not runs:
        return base, FillReport(np.zeros(base.shape, dtype=bool), [], 0)
    warps, all_plans, cost = [], [], 0
    for comp in comps:
        plans = plan_selective(base, runs, comp, target_baseline_pos, extra_pixels)
        filt = _plan_filter(plans, comp.shape[0])
        req = WarpRequest(comp, target_baseline_pos, filt)
        cost += int(np.count_nonzero(filter_mask(filt, comp.shape)))
        warps.append(forward_warp(req))
        all_plans.extend(plans)
    out, filled = _write_candidates(base, warps)
    return out, FillReport(filled, _run_counts(runs, filled), cost, all_plans)


def inpaint_baseline(base: WarpedView) -> WarpedView:
    """Fill every hole by repeating its background-side edge sample.

    A deliberately simple reference fill, not a real inpainting method.
    Rows with no samples at all copy the nearest filled row.
    """
    tex = base.texture.copy()
    z = base.zbuffer.copy()
    h, _ = z.shape
    holes = base.hole_mask
    for r in range(h):
        for s, e in runs_in_row(holes[r]):
            run = HoleRun(r, s, e)
            try:
                z_bg, side = estimate_background_depth(base, run)
            except FillError:
                continue
            src = s - 1 if side == LEFT else e + 1
            tex[r, s : e + 1] = base.texture[r, src]
            z[r, s : e + 1] = base.zbuffer[r, src]

    empty = np.all(z == EMPTY, axis=1)
    empty_rows = np.flatnonzero(empty).tolist()
    full_rows = np.flatnonzero(~empty).tolist()
    for r in empty_rows:
        if not full_rows:
            tex[r] = 0
            z[r] = base.z_far
            continue
        src = min(full_rows, key=lambda k: (abs(k - r), k))
        tex[r] = tex[src]
        z[r] = z[src]
    return WarpedView(tex, z, base.z_near, base.z_far)
