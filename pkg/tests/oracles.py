"""Brute-force reference implementations used only by the tests.

Nothing here imports the package's warper, predictor or renderer.
"""

from __future__ import annotations

import math
from fractions import Fraction


def haz(x: float) -> int:
    """Round half away from zero."""
    return math.floor(x + 0.5) if x >= 0 else math.ceil(x - 0.5)


def decode_exact(v: int, z_near, z_far) -> Fraction:
    zn, zf = Fraction(z_near), Fraction(z_far)
    inv = Fraction(v, 255) * (1 / zn - 1 / zf) + 1 / zf
    return 1 / inv


def painter_warp_row(tex_row, z_row, dx_row, width):
    """Warp one row by painting far to near; lower source column wins ties.

    Returns (texture list, depth list) with ``None`` for holes.
    """
    items = []
    for c, (t, z, dx) in enumerate(zip(tex_row, z_row, dx_row)):
        tc = c + dx
        if 0 <= tc < width:
            items.append((z, c, tc, t))
    # far first; among equal depths paint higher columns first so the lower
    # column is painted last and survives
    items.sort(key=lambda it: (-it[0], -it[1]))
    out_t = [None] * width
    out_z = [None] * width
    for z, c, tc, t in items:
        out_t[tc] = t
        out_z[tc] = z
    return out_t, out_z


def layered_scanline_holes(fg: set, offsets: list, lo: int, hi: int) -> list:
    """Hole sets of several warped reference views of a two-depth scanline.

    World positions are virtual-view columns; ``fg`` holds the foreground
    columns, everything else is background.  A reference with offset ``o``
    shows foreground point ``u`` at column ``u + 2*o`` and background point
    ``u`` at ``u + o``.  Each reference is rendered column by column over a
    wide range, every visible point is warped back to ``u`` and painted far
    to near; unpainted columns in ``[lo, hi]`` are holes.
    """
    out = []
    for o in offsets:
        pad = 4 * abs(o) + 4
        painted_bg, painted_fg = set(), set()
        for c in range(lo - pad, hi + pad + 1):
            u_fg = c - 2 * o
            if u_fg in fg:
                painted_fg.add(u_fg)
            else:
                painted_bg.add(c - o)
        canvas = {}
        for u in painted_bg:
            canvas[u] = "B"
        for u in painted_fg:
            canvas[u] = "F"
        out.append({t for t in range(lo, hi + 1) if t not in canvas})
    return out


def interval_of(cols: set):
    """Single inclusive interval covering a contiguous set, or None."""
    if not cols:
        return None
    a, b = min(cols), max(cols)
    assert len(cols) == b - a + 1, f"not contiguous: {sorted(cols)}"
    return (a, b)


def fbfb_oracle(l_bg, l_fg, dd_p, dd_s):
    """(conventional, reduced) hole intervals for the F-B-F-B layout, y1 = 0."""
    fg = set(range(-20, 1)) | set(range(l_bg + 1, l_bg + l_fg + 1))
    lp, rp, rc = layered_scanline_holes(fg, [dd_p, -dd_p, -dd_s], -10, l_bg + l_fg + 30)
    merged = lp & rp
    return interval_of(merged), interval_of(merged & rc)


def bfb_oracle(l_fg, dd_p, dd_s):
    """(conventional, reduced) hole intervals left of a B-F-B object, y2 = 0."""
    fg = set(range(0, l_fg))
    p, c = layered_scanline_holes(fg, [-dd_p, -dd_s], -40, -1)
    return interval_of(p), interval_of(p & c)
