import numpy as np
import pytest

from mvsynth.core import EMPTY, CameraParams, HoleRun, View, WarpedView, extract_hole_runs
from mvsynth.holefill import (
    LEFT,
    RIGHT,
    FillError,
    estimate_background_depth,
    fill_full,
    fill_selective,
    inpaint_baseline,
    plan_selective,
)
from mvsynth.merger import merge
from mvsynth.pipeline import synthesize
from mvsynth.synthscene import (
    SCANLINE_Z_FAR,
    SCANLINE_Z_FG,
    fbfb_anchor,
    make_fbfb,
    preset_scene,
    render_rig,
    render_view,
    scanline_interp_rig,
)
from mvsynth.warper import WarpRequest, forward_warp


def row_view(zs, z_near=1.0, z_far=50.0):
    z = np.array([[EMPTY if v is None else v for v in zs]], float)
    tex = np.zeros(z.shape + (3,), np.uint8)
    tex[0, :, 0] = np.arange(z.shape[1]) * 10 % 256
    return WarpedView(tex, z, z_near, z_far)


def fbfb_setup(l_bg, l_fg, dd_p, dd_s, height=1):
    rig = scanline_interp_rig(dd_p, dd_s)
    scene = make_fbfb(l_bg, l_fg, SCANLINE_Z_FG, SCANLINE_Z_FAR, list(rig.values()), height=height)
    lp, rp, rc = (render_view(scene, rig[k]) for k in ("LP", "RP", "RC"))
    base = merge(forward_warp(WarpRequest(lp, 0.0)), forward_warp(WarpRequest(rp, 0.0)))
    return scene, base, rc


def rel(runs, a):
    return [(r.start_col - a, r.end_col - a) for r in runs]


# --- no-op fills ----------------------------------------------------------


def test_fill_without_holes_is_a_noop():
    cam = CameraParams(1, 1000.0, 0.0, 1.0, 50.0)
    comp = View(np.full((2, 6, 3), 9, np.uint8), np.zeros((2, 6), np.uint8), cam)
    base = WarpedView(np.full((2, 6, 3), 7, np.uint8), np.full((2, 6), 5.0), 1.0, 50.0)
    for fn in (fill_full, fill_selective):
        out, rep = fn(base, [comp], 0.0)
        assert np.array_equal(out.texture, base.texture)
        assert rep.filled == 0
    assert fill_selective(base, [comp], 0.0)[1].cost == 0


def test_fill_requires_a_view():
    base = row_view([1.0, None, 2.0])
    with pytest.raises(FillError):
        fill_full(base, [], 0.0)
    with pytest.raises(FillError):
        fill_selective(base, [], 0.0)


# --- geometric scene: hole [1, 2] reduced to [1, 1] -------------------------


def test_scene_hole_reduced_by_complementary_view():
    scene, base, rc = fbfb_setup(2, 5, 3, 6)
    a = fbfb_anchor(scene)
    assert rel(extract_hole_runs(base), a) == [(1, 2)]
    for fn in (fill_full, fill_selective):
        out, rep = fn(base, [rc], 0.0)
        assert rel(extract_hole_runs(out), a) == [(1, 1)]
        assert rep.run_fill_counts == [1]


def test_selective_equals_full_on_scene():
    scene, base, rc = fbfb_setup(3, 4, 2, 7, height=3)
    full, frep = fill_full(base, [rc], 0.0)
    sel, srep = fill_selective(base, [rc], 0.0)
    assert np.array_equal(frep.filled_mask, srep.filled_mask)
    m = srep.filled_mask
    assert np.array_equal(full.texture[m], sel.texture[m])
    assert np.array_equal(sel.zbuffer, full.zbuffer)
    # selective cost is bounded by the planned lengths
    bound = sum(p.length for p in srep.plans)
    assert 0 < srep.cost <= bound < frep.cost


def test_union_of_two_views_covers_at_least_each_alone():
    scene, base, rc = fbfb_setup(2, 5, 3, 6)
    rig = scanline_interp_rig(3, 8)
    rc2 = render_view(scene, CameraParams(4, rig["RC"].focal_length_px, 0.8, 25.0, 100.0))
    both = fill_full(base, [rc, rc2], 0.0)[1].filled_mask
    for one in ([rc], [rc2]):
        alone = fill_full(base, one, 0.0)[1].filled_mask
        assert np.all(both >= alone)
    assert both.sum() == 2  # the whole 2-pixel hole


def test_planned_interval_contains_full_warp_provenance():
    scene, base, rc = fbfb_setup(2, 5, 3, 8)
    out, rep = fill_full(base, [rc], 0.0)
    plans = plan_selective(base, extract_hole_runs(base), rc, 0.0)
    for r, c in zip(*np.nonzero(rep.filled_mask)):
        src = out.source_col[r, c]
        assert any(p.run.row == r and p.src_start <= src <= p.src_end for p in plans)


def test_fills_only_touch_holes():
    _, base, rc = fbfb_setup(4, 6, 2, 5, height=2)
    keep = ~base.hole_mask
    for fn in (fill_full, fill_selective):
        out, _ = fn(base, [rc], 0.0)
        assert np.array_equal(out.texture[keep], base.texture[keep])
    out = inpaint_baseline(base)
    assert np.array_equal(out.texture[keep], base.texture[keep])


# --- background depth -----------------------------------------------------


def test_background_is_the_farther_flank():
    v = row_view([10.0, None, None, 50.0, 50.0])
    assert estimate_background_depth(v, HoleRun(0, 1, 2)) == (50.0, RIGHT)
    v = row_view([50.0, None, 10.0])
    assert estimate_background_depth(v, HoleRun(0, 1, 1)) == (50.0, LEFT)


def test_background_at_image_edge_uses_only_flank():
    v = row_view([None, None, 30.0, 4.0])
    assert estimate_background_depth(v, HoleRun(0, 0, 1)) == (30.0, RIGHT)


def test_background_fallback_searches_window():
    # 2 and 2.1 are within 10% of the range 1..50, so the search finds 48
    v = row_view([48.0, 3.0, 2.0, None, None, 2.1, 5.0])
    assert estimate_background_depth(v, HoleRun(0, 3, 4)) == (48.0, LEFT)
    # a window of 1 sees only the flanks themselves
    assert estimate_background_depth(v, HoleRun(0, 3, 4), window=1) == (2.1, RIGHT)


def test_background_needs_a_sample():
    with pytest.raises(FillError):
        estimate_background_depth(row_view([None, None]), HoleRun(0, 0, 1))


# --- plans ----------------------------------------------------------------


def _comp(b, w=40):
    cam = CameraParams(3, 1000.0, b, 1.0, 50.0)
    return View(np.zeros((1, w, 3), np.uint8), np.zeros((1, w), np.uint8), cam)


def test_plan_length_is_run_plus_extra():
    v = row_view([50.0] * 10 + [None] * 4 + [5.0] * 26)
    (p,) = plan_selective(v, [HoleRun(0, 10, 13)], _comp(0.0), 0.0, extra_pixels=2)
    assert p.length == 6
    # comp at the target's own baseline maps the edge onto itself
    assert (p.side, p.src_start, p.src_end) == (LEFT, 10, 15)


def test_plan_right_side_extends_left():
    v = row_view([5.0] * 10 + [None] * 4 + [50.0] * 26)
    (p,) = plan_selective(v, [HoleRun(0, 10, 13)], _comp(0.0), 0.0)
    assert (p.side, p.src_start, p.src_end) == (RIGHT, 8, 13)


def test_plan_shifts_with_baseline_and_clips():
    v = row_view([50.0] * 10 + [None] * 4 + [5.0] * 26)
    # comp 0.5 to the right: background at z=50 sits 10 px further left there
    (p,) = plan_selective(v, [HoleRun(0, 10, 13)], _comp(0.5), 0.0)
    assert (p.src_start, p.src_end) == (0, 5)
    # shifted fully outside the image: no plan
    assert plan_selective(v, [HoleRun(0, 10, 13)], _comp(2.0), 0.0) == []


# --- inpainting -----------------------------------------------------------


def test_inpaint_copies_background_neighbour():
    v = row_view([50.0, None, None, 5.0])
    out = inpaint_baseline(v)
    assert not out.hole_mask.any()
    assert out.texture[0, 1].tolist() == out.texture[0, 2].tolist() == v.texture[0, 0].tolist()
    v = row_view([5.0, None, 40.0])
    assert inpaint_baseline(v).texture[0, 1].tolist() == v.texture[0, 2].tolist()


def test_inpaint_empty_rows_copy_nearest_row():
    z = np.array([[EMPTY] * 3, [7.0, 8.0, 9.0]])
    tex = np.zeros((2, 3, 3), np.uint8)
    tex[1] = 200
    out = inpaint_baseline(WarpedView(tex, z, 1.0, 50.0))
    assert out.texture[0].tolist() == out.texture[1].tolist()
    assert not out.hole_mask.any()


@pytest.mark.parametrize("width", [480, 1920])
def test_selective_samples_agree_with_full_unless_occluded(width):
    # a selectively warped sample can only lose to a nearer sample that the
    # plan did not include; equal depth means the same source pixel
    from mvsynth.pipeline import synthesize
    from mvsynth.synthscene import preset_scene, render_rig

    p = preset_scene("multi", width=width, height=32)
    views = render_rig(p.scene, p.rig)
    tb = p.target.baseline_pos
    full = synthesize(views, tb, "interp", [3, 5], [1, 7], "full")
    sel = synthesize(views, tb, "interp", [3, 5], [1, 7], "selective")
    fm, sm = full.filled_mask, sel.filled_mask
    assert not (sm & ~fm).any()
    both = sm & fm
    assert np.all(full.output.zbuffer[both] <= sel.output.zbuffer[both])
    same = both & (full.output.zbuffer == sel.output.zbuffer)
    assert np.array_equal(full.output.texture[same], sel.output.texture[same])
    if width == 1920:
        assert same.sum() == both.sum()
