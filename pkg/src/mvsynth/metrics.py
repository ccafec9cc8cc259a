"""Hole counts, hole reduction, masked PSNR and report rows."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import astuple, dataclass, fields
from typing import Iterable, Optional

import numpy as np

from .core import WarpedView, margin_window

DEFAULT_MARGIN = 60

#: PSNR of identical images.
PSNR_IDENTICAL = math.inf

_LUMA = np.array([0.299, 0.587, 0.114])


def _mask_of(view) -> np.ndarray:
    return view.hole_mask if isinstance(view, WarpedView) else np.asarray(view, dtype=bool)


def hole_count(view, margin: int = DEFAULT_MARGIN) -> int:
    """Number of hole pixels inside the window ``margin`` pixels from every border."""
    mask = _mask_of(view)
    rows, cols = margin_window(mask.shape, margin)
    return int(np.count_nonzero(mask[rows, cols]))


def window_mask(shape: tuple[int, int], margin: int = DEFAULT_MARGIN) -> np.ndarray:
    rows, cols = margin_window(shape, margin)
    m = np.zeros(shape, dtype=bool)
    m[rows, cols] = True
    return m


def reduction_pct(before: int, after: int) -> float:
    """Percentage of holes removed; 0 when there were none to begin with."""
    if after < 0 or before < 0:
        raise ValueError("hole counts must be non-negative")
    if after > before:
        raise ValueError(f"hole count grew from {before} to {after}")
    if before == 0:
        return 0.0
    return 100.0 * (before - after) / before


def psnr_masked(a: np.ndarray, b: np.ndarray, mask, luma: bool = False, peak: float = 255.0) -> float:
    """PSNR over the masked pixels, MSE averaged over all three channels.

    With ``luma=True`` both images are first reduced to BT.601 luma.
    Identical pixels give :data:`PSNR_IDENTICAL`.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    mask = np.asarray(mask, dtype=bool)
    if a.shape != b.shape:
        raise ValueError(f"image shapes differ: {a.shape} vs {b.shape}")
    if mask.shape != a.shape[:2]:
        raise ValueError("mask does not match image size")
    if not mask.any():
        raise ValueError("empty mask")
    if luma:
        a, b = a @ _LUMA, b @ _LUMA
    mse = np.mean((a[mask] - b[mask]) ** 2)
    if mse == 0:
        return PSNR_IDENTICAL
    return 10.0 * math.log10(peak**2 / mse)


@dataclass
class ReportRow:
    config: str
    hole_before: int
    hole_after: int
    reduction_pct: float
    psnr_filled_db: Optional[float]
    warp_cost_px: int

    def format_line(self) -> str:
        psnr = "n/a" if self.psnr_filled_db is None else f"{self.psnr_filled_db:.2f} dB"
        return (
            f"{self.config}: holes {self.hole_before} -> {self.hole_after} "
            f"({self.reduction_pct:.2f}% reduction), filled PSNR {psnr}, "
            f"warped {self.warp_cost_px} px"
        )


REPORT_HEADER = [f.name for f in fields(ReportRow)]


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return "inf" if math.isinf(v) else f"{v:.4f}"
    return str(v)


def format_csv(rows: Iterable[ReportRow], header: bool = True) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    if header:
        wr.writerow(REPORT_HEADER)
    for r in rows:
        wr.writerow([_cell(v) for v in astuple(r)])
    return buf.getvalue()


def parse_csv(text: str) -> list[ReportRow]:
    rd = csv.DictReader(io.StringIO(text))
    if rd.fieldnames != REPORT_HEADER:
        raise ValueError(f"unexpected report header {rd.fieldnames}")
    out = []
    for rec in rd:
        psnr = rec["psnr_filled_db"]
        out.append(
            ReportRow(
                rec["config"],
                int(rec["hole_before"]),
                int(rec["hole_after"]),
                float(rec["reduction_pct"]),
                None if psnr == "" else float(psnr),
                int(rec["warp_cost_px"]),
            )
        )
    return out
