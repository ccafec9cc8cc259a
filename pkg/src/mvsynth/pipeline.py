"""Warp, merge and fill: one synthesis configuration end to end."""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np

from .core import View, WarpedView
from .holefill import FillReport, fill_full, fill_selective, inpaint_baseline
from .merger import baseline_weight, merge
from .warper import WarpRequest, forward_warp

MODES = ("interp", "extrap")
FILLS = ("none", "full", "selective", "inpaint")


class ConfigError(ValueError):
    """Inconsistent choice of views or fill method."""


def config_name(mode: str, n_comps: int, fill: str) -> str:
    """Configuration label, e.g. ``2PV+SW_2CV`` or ``PV+CV``."""
    pv = "2PV" if mode == "interp" else "PV"
    if fill == "none":
        return pv
    if fill == "inpaint":
        return f"{pv}+Inpainting"
    cv = "CV" if n_comps == 1 else f"{n_comps}CV"
    return f"{pv}+SW_{cv}" if fill == "selective" else f"{pv}+{cv}"


@dataclass
class SynthesisResult:
    config: str
    base: WarpedView
    output: WarpedView
    filled_mask: np.ndarray
    warp_cost: int
    fill_report: Optional[FillReport]
    seconds: float


def validate_config(mode: str, primaries: Sequence[int], comps: Sequence[int], fill: str) -> None:
    if mode not in MODES:
        raise ConfigError(f"unknown mode {mode!r}")
    if fill not in FILLS:
        raise ConfigError(f"unknown fill {fill!r}")
    want = 2 if mode == "interp" else 1
    if len(primaries) != want:
        raise ConfigError(f"{mode} needs exactly {want} primary view(s), got {len(primaries)}")
    if fill in ("full", "selective") and not comps:
        raise ConfigError(f"fill={fill} needs at least one complementary view")
    if fill in ("none", "inpaint") and comps:
        raise ConfigError(f"fill={fill} does not use complementary views")
    overlap = set(primaries) & set(comps)
    if overlap or len(set(comps)) != len(comps):
        raise ConfigError("view ids must be distinct across primaries and complementaries")


def synthesize(
    views: Mapping[int, View],
    target_baseline_pos: float,
    mode: str,
    primaries: Sequence[int],
    comps: Sequence[int] = (),
    fill: str = "none",
) -> SynthesisResult:
    validate_config(mode, primaries, comps, fill)
    missing = [v for v in (*primaries, *comps) if v not in views]
    if missing:
        raise ConfigError(f"unknown view id(s): {missing}")
    t0 = time.perf_counter()
    prim = [views[v] for v in primaries]
    warps = [forward_warp(WarpRequest(v, target_baseline_pos)) for v in prim]
    cost = sum(v.shape[0] * v.shape[1] for v in prim)
    if mode == "interp":
        (lv, lw), (rv, rw) = sorted(zip(prim, warps), key=lambda t: t[0].camera.baseline_pos)
        w_left = baseline_weight(lv.camera.baseline_pos, rv.camera.baseline_pos, target_baseline_pos)
        base = merge(lw, rw, w_left)
    else:
        base = warps[0]

    report = None
    comp_views = [views[v] for v in comps]
    if fill == "full":
        out, report = fill_full(base, comp_views, target_baseline_pos)
    elif fill == "selective":
        out, report = fill_selective(base, comp_views, target_baseline_pos)
    elif fill == "inpaint":
        out = inpaint_baseline(base)
    else:
        out = base
    if report is not None:
        cost += report.cost
        filled = report.filled_mask
    else:
        filled = base.hole_mask & ~out.hole_mask
    return SynthesisResult(
        config_name(mode, len(comps), fill),
        base,
        out,
        filled,
        cost,
        report,
        time.perf_counter() - t0,
    )
