"""Command line entry point: ``genscene``, ``synthesize`` and ``evaluate``.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .core import GeometryError, check_rig
from .holefill import FillError
from .io_formats import (
    FormatError,
    read_image,
    read_mask,
    read_rig,
    read_view,
    write_hole_overlay,
    write_image,
    write_mask,
    write_rig,
    write_view,
)
from .metrics import (
    DEFAULT_MARGIN,
    REPORT_HEADER,
    ReportRow,
    format_csv,
    hole_count,
    psnr_masked,
    reduction_pct,
)
from .pipeline import FILLS, MODES, ConfigError, synthesize, validate_config
from .synthscene import (
    PRESETS,
    SceneError,
    format_scene,
    load_scene,
    preset_rig,
    preset_scene,
    render_ground_truth,
    render_view,
)

log = logging.getLogger("mvsynth")

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2
DATA_ERRORS = (FormatError, GeometryError, SceneError, FillError, OSError)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def texture_name(view_id: int) -> str:
    return f"view_{view_id}_texture.png"


def depth_name(view_id: int) -> str:
    return f"view_{view_id}_depth.pgm"


# --- genscene --------------------------------------------------------------


def cmd_genscene(args) -> int:
    out = Path(args.out)
    if args.scene:
        scene = load_scene(args.scene)
        rig = read_rig(args.rig) if args.rig else list(preset_rig())
        target_id = args.target_view
        info = {"preset": None}
    else:
        preset = preset_scene(args.preset, args.width, args.height, args.seed)
        scene, rig, target_id = preset.scene, list(preset.rig), preset.target_id
        info = {
            "preset": preset.name,
            "interp_primaries": list(preset.interp_primaries),
            "interp_comps": list(preset.interp_comps),
            "interp_extra_comps": list(preset.interp_extra_comps),
            "extrap_primary": preset.extrap_primary,
            "extrap_comps": list(preset.extrap_comps),
            "extrap_extra_comps": list(preset.extrap_extra_comps),
        }
    check_rig(rig)
    by_id = {c.view_id: c for c in rig}
    if target_id not in by_id:
        raise UsageError(f"target view {target_id} is not in the rig")
    out.mkdir(parents=True, exist_ok=True)
    write_rig(out / "rig.txt", rig)
    (out / "scene.txt").write_text(format_scene(scene))
    for c in rig:
        if c.view_id == target_id:
            continue
        write_view(render_view(scene, c), out / texture_name(c.view_id), out / depth_name(c.view_id))
    truth = render_ground_truth(scene, by_id[target_id])
    write_view(truth, out / "truth_texture.png", out / "truth_depth.pgm")
    info["target_view"] = target_id
    (out / "scene.json").write_text(json.dumps(info, indent=2, sort_keys=True) + "\n")
    print(f"wrote {len(rig) - 1} views and ground truth for view {target_id} to {out}")
    return EXIT_OK


# --- synthesize ------------------------------------------------------------


def _id_paths(items, flag):
    paths = {}
    for item in items or []:
        vid, sep, path = item.partition("=")
        if not sep:
            raise UsageError(f"{flag} expects ID=PATH, got {item!r}")
        try:
            paths[int(vid)] = path
        except ValueError:
            raise UsageError(f"{flag}: bad view id {vid!r}") from None
    return paths


def _yuv_size(text):
    if text is None:
        return None
    try:
        w, h = text.lower().split("x")
        return int(w), int(h)
    except ValueError:
        raise UsageError(f"--yuv-size expects WxH, got {text!r}") from None


def sidecar_paths(out: Path) -> dict[str, Path]:
    stem = out.with_suffix("")
    return {
        "holes": Path(f"{stem}.holes.pgm"),
        "filled": Path(f"{stem}.filled.pgm"),
        "meta": Path(f"{stem}.json"),
    }


def append_report(path: Path, rows) -> None:
    new = not path.exists() or path.stat().st_size == 0
    if not new:
        head = path.read_text().splitlines()[0].split(",")
        if head != REPORT_HEADER:
            raise FormatError(f"{path}: existing report has a different header")
    with open(path, "a") as fh:
        fh.write(format_csv(rows, header=new))


def cmd_synthesize(args) -> int:
    rig = read_rig(args.rig)
    by_id = {c.view_id: c for c in rig}
    comps = args.comp or []
    if args.target_view is not None:
        if args.target_view not in by_id:
            raise UsageError(f"unknown target view id {args.target_view}")
        target_b = by_id[args.target_view].baseline_pos
    else:
        target_b = args.target_baseline
    for vid in (*args.primary, *comps):
        if vid not in by_id:
            raise UsageError(f"unknown view id {vid}")
    try:
        validate_config(args.mode, args.primary, comps, args.fill)
    except ConfigError as e:
        raise UsageError(str(e)) from None

    tex_paths = _id_paths(args.texture, "--texture")
    dep_paths = _id_paths(args.depth, "--depth")
    vdir = Path(args.view_dir) if args.view_dir else None
    views = {}
    for vid in (*args.primary, *comps):
        tp = tex_paths.get(vid) or (vdir / texture_name(vid) if vdir else None)
        dp = dep_paths.get(vid) or (vdir / depth_name(vid) if vdir else None)
        if tp is None or dp is None:
            raise UsageError(f"no texture/depth path for view {vid} (use --view-dir or --texture/--depth)")
        views[vid] = read_view(tp, dp, by_id[vid], _yuv_size(args.yuv_size), args.frame)

    res = synthesize(views, target_b, args.mode, args.primary, comps, args.fill)
    out = Path(args.out)
    write_image(out, res.output.as_view_texture())
    side = sidecar_paths(out)
    write_mask(side["holes"], res.output.hole_mask)
    write_mask(side["filled"], res.filled_mask)
    before = hole_count(res.base, args.margin)
    after = hole_count(res.output, args.margin)
    psnr = None
    if args.truth and res.filled_mask.any():
        truth = read_image(args.truth)
        psnr = psnr_masked(res.output.texture, truth, res.filled_mask)
    meta = {
        "config": res.config,
        "mode": args.mode,
        "primaries": list(args.primary),
        "comps": list(comps),
        "fill": args.fill,
        "target_baseline_pos": target_b,
        "margin": args.margin,
        "hole_before": before,
        "hole_after": after,
        "warp_cost_px": res.warp_cost,
    }
    side["meta"].write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    if args.overlay:
        write_hole_overlay(res.output, args.overlay)
    row = ReportRow(res.config, before, after, reduction_pct(before, after), psnr, res.warp_cost)
    print(row.format_line())
    log.info("%s took %.3f s", res.config, res.seconds)
    if args.report:
        append_report(Path(args.report), [row])
    return EXIT_OK


# --- evaluate --------------------------------------------------------------


def load_result(path):
    """Synthesized texture, hole mask, filled mask and metadata of one output."""
    path = Path(path)
    side = sidecar_paths(path)
    tex = read_image(path)
    holes = read_mask(side["holes"])
    filled = read_mask(side["filled"])
    meta = json.loads(side["meta"].read_text())
    if holes.shape != tex.shape[:2] or filled.shape != tex.shape[:2]:
        raise FormatError(f"{path}: sidecar masks do not match the image size")
    return tex, holes, filled, meta


def evaluate_results(truth: np.ndarray, results, margin: int) -> list[ReportRow]:
    rows = []
    first = None
    for tex, holes, filled, meta in results:
        if tex.shape != truth.shape:
            raise FormatError(f"{meta.get('config')}: output is {tex.shape}, truth is {truth.shape}")
        n = hole_count(holes, margin)
        if first is None:
            first = n
        psnr = psnr_masked(tex, truth, filled) if filled.any() else None
        # more holes than the reference configuration counts as no reduction
        red = reduction_pct(first, n) if n <= first else 100.0 * (first - n) / first
        rows.append(ReportRow(meta["config"], first, n, red, psnr, int(meta["warp_cost_px"])))
    return rows


def cmd_evaluate(args) -> int:
    if len(args.results) < 2:
        raise UsageError("evaluate needs at least two synthesized outputs")
    truth = read_image(args.truth)
    rows = evaluate_results(truth, [load_result(p) for p in args.results], args.margin)
    for r in rows:
        print(r.format_line())
    if args.report:
        Path(args.report).write_text(format_csv(rows))
    else:
        sys.stdout.write(format_csv(rows))
    return EXIT_OK


# --- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="mvsynth", description="Multi-view DIBR synthesis with complementary views.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("genscene", help="render a synthetic multi-view dataset")
    src = g.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset", choices=PRESETS)
    src.add_argument("--scene", help="plain-text scene description")
    g.add_argument("--rig", help="rig file for --scene (default: the preset rig)")
    g.add_argument("--target-view", type=int, default=4)
    g.add_argument("--width", type=int, default=1920)
    g.add_argument("--height", type=int, default=256)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True, help="output directory")
    g.set_defaults(func=cmd_genscene)

    s = sub.add_parser("synthesize", help="synthesize one virtual view")
    s.add_argument("--mode", choices=MODES, required=True)
    s.add_argument("--primary", type=int, nargs="+", required=True)
    s.add_argument("--comp", type=int, nargs="*", default=[])
    s.add_argument("--fill", choices=FILLS, default="none")
    tgt = s.add_mutually_exclusive_group(required=True)
    tgt.add_argument("--target-view", type=int)
    tgt.add_argument("--target-baseline", type=float)
    s.add_argument("--margin", type=int, default=DEFAULT_MARGIN)
    s.add_argument("--rig", required=True)
    s.add_argument("--view-dir", help="directory with view_<id>_texture.png / view_<id>_depth.pgm")
    s.add_argument("--texture", action="append", metavar="ID=PATH")
    s.add_argument("--depth", action="append", metavar="ID=PATH")
    s.add_argument("--yuv-size", metavar="WxH", help="frame size for .yuv inputs")
    s.add_argument("--frame", type=int, default=0, help="frame index for .yuv inputs")
    s.add_argument("--truth", help="ground-truth texture for filled-pixel PSNR")
    s.add_argument("--out", required=True, help="synthesized image (PNG)")
    s.add_argument("--overlay", help="PNG with holes painted green")
    s.add_argument("--report", help="CSV report to append the metrics row to")
    s.set_defaults(func=cmd_synthesize)

    e = sub.add_parser("evaluate", help="compare synthesized outputs against ground truth")
    e.add_argument("--truth", required=True)
    e.add_argument("--margin", type=int, default=DEFAULT_MARGIN)
    e.add_argument("--report", help="write the CSV table here instead of stdout")
    e.add_argument("results", nargs="+", help="synthesized PNGs written by 'synthesize'")
    e.set_defaults(func=cmd_evaluate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except UsageError as e:
        print(f"mvsynth: usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except DATA_ERRORS + (ValueError,) as e:
        print(f"mvsynth: error: {e}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
