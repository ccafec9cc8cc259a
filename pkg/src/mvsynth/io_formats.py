"""Image, depth, YUV and rig file I/O.

Binary PGM/PPM (P5/P6, maxval 255) are read and written here directly; PNG
goes through Pillow.  Planar YUV 4:2:0 frames are converted to RGB with
full-range BT.601.
"""

from __future__ import annotations

import os
import re
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from PIL import Image

from .core import CameraParams, GeometryError, View, WarpedView, check_rig


class FormatError(ValueError):
    """Malformed or inconsistent input file."""


GREEN = (0, 255, 0)

# --- netpbm ----------------------------------------------------------------

_TOKEN = re.compile(rb"\s*(?:#[^\n]*\n\s*)*(\S+)")


def _header_tokens(data: bytes, n: int) -> tuple[list[bytes], int]:
    toks, pos = [], 0
    for _ in range(n):
        m = _TOKEN.match(data, pos)
        if not m:
            raise FormatError("truncated netpbm header")
        toks.append(m.group(1))
        pos = m.end()
    if pos >= len(data) or data[pos : pos + 1] not in b" \t\r\n":
        raise FormatError("netpbm header must end with a single whitespace byte")
    return toks, pos + 1


def decode_netpbm(data: bytes) -> np.ndarray:
    """Decode binary P5 (gray) or P6 (RGB) with maxval 255."""
    toks, off = _header_tokens(data, 4)
    magic = toks[0]
    if magic not in (b"P5", b"P6"):
        raise FormatError(f"unsupported netpbm type {magic!r}")
    try:
        w, h, maxval = (int(t) for t in toks[1:])
    except ValueError:
        raise FormatError("non-numeric netpbm header field") from None
    if w < 1 or h < 1:
        raise FormatError("netpbm dimensions must be positive")
    if maxval != 255:
        raise FormatError(f"only 8-bit netpbm is supported (maxval {maxval})")
    ch = 3 if magic == b"P6" else 1
    need = w * h * ch
    body = data[off:]
    if len(body) != need:
        raise FormatError(f"netpbm payload has {len(body)} bytes, expected {need}")
    a = np.frombuffer(body, dtype=np.uint8)
    return a.reshape(h, w, 3).copy() if ch == 3 else a.reshape(h, w).copy()


def encode_netpbm(img: np.ndarray) -> bytes:
    img = np.ascontiguousarray(img, dtype=np.uint8)
    if img.ndim == 2:
        magic = b"P5"
    elif img.ndim == 3 and img.shape[2] == 3:
        magic = b"P6"
    else:
        raise FormatError(f"cannot store array of shape {img.shape} as netpbm")
    h, w = img.shape[:2]
    return magic + f"\n{w} {h}\n255\n".encode() + img.tobytes()


# --- generic images --------------------------------------------------------


def read_image(path, gray: bool = False) -> np.ndarray:
    """Read PNG/PGM/PPM as ``(H, W)`` gray or ``(H, W, 3)`` RGB uint8."""
    path = Path(path)
    ext = path.suffix.lower()
    if ext in (".pgm", ".ppm", ".pnm"):
        img = decode_netpbm(path.read_bytes())
    elif ext == ".png":
        try:
            with Image.open(path) as im:
                im.load()
                if im.mode not in ("L", "RGB", "RGBA"):
                    raise FormatError(f"{path}: unsupported PNG mode {im.mode}")
                img = np.asarray(im.convert("RGB") if im.mode == "RGBA" else im).copy()
        except (OSError, SyntaxError) as e:
            raise FormatError(f"{path}: {e}") from None
    else:
        raise FormatError(f"{path}: unknown image extension {ext!r}")
    if gray:
        if img.ndim != 2:
            raise FormatError(f"{path}: expected a single-channel image")
        return img
    if img.ndim == 2:
        img = np.repeat(img[:, :, None], 3, axis=2)
    return img


def write_image(path, img: np.ndarray) -> None:
    path = Path(path)
    ext = path.suffix.lower()
    if ext in (".pgm", ".ppm", ".pnm"):
        if (img.ndim == 2) != (ext == ".pgm") and ext != ".pnm":
            raise FormatError(f"{path}: channel count does not match extension")
        path.write_bytes(encode_netpbm(img))
    elif ext == ".png":
        Image.fromarray(np.ascontiguousarray(img, dtype=np.uint8)).save(path)
    else:
        raise FormatError(f"{path}: unknown image extension {ext!r}")


# --- YUV 4:2:0 -------------------------------------------------------------


def yuv420_frame_size(width: int, height: int) -> int:
    if width % 2 or height % 2 or width < 2 or height < 2:
        raise FormatError("YUV 4:2:0 needs positive even width and height")
    return width * height * 3 // 2


def read_yuv420_planes(path, width: int, height: int, frame: int = 0):
    """Y, U, V planes of one frame of a raw planar 4:2:0 file."""
    fsize = yuv420_frame_size(width, height)
    total = os.path.getsize(path)
    if total % fsize:
        raise FormatError(f"{path}: size {total} is not a whole number of {width}x{height} frames")
    nframes = total // fsize
    if not 0 <= frame < nframes:
        raise FormatError(f"{path}: frame {frame} out of range (file has {nframes})")
    with open(path, "rb") as fh:
        fh.seek(frame * fsize)
        buf = np.frombuffer(fh.read(fsize), dtype=np.uint8)
    ysz = width * height
    csz = ysz // 4
    y = buf[:ysz].reshape(height, width)
    u = buf[ysz : ysz + csz].reshape(height // 2, width // 2)
    v = buf[ysz + csz :].reshape(height // 2, width // 2)
    return y, u, v


def yuv420_to_rgb(y: np.ndarray, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Full-range BT.601 conversion, chroma upsampled by pixel replication."""
    yf = y.astype(np.float64)
    uf = np.repeat(np.repeat(u, 2, axis=0), 2, axis=1).astype(np.float64) - 128.0
    vf = np.repeat(np.repeat(v, 2, axis=0), 2, axis=1).astype(np.float64) - 128.0
    r = yf + 1.402 * vf
    g = yf - 0.344136 * uf - 0.714136 * vf
    b = yf + 1.772 * uf
    rgb = np.stack([r, g, b], axis=-1)
    return np.clip(np.floor(rgb + 0.5), 0, 255).astype(np.uint8)


def rgb_to_yuv420(rgb: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Full-range BT.601 forward conversion, chroma averaged over 2x2 blocks."""
    f = rgb.astype(np.float64)
    r, g, b = f[..., 0], f[..., 1], f[..., 2]
    y = 0.299 * r + 0.587 * g + 0.114 * b
    u = -0.168736 * r - 0.331264 * g + 0.5 * b + 128.0
    v = 0.5 * r - 0.418688 * g - 0.081312 * b + 128.0
    h, w = y.shape

    def sub(c):
        return c.reshape(h // 2, 2, w // 2, 2).mean(axis=(1, 3))

    q = lambda c: np.clip(np.floor(c + 0.5), 0, 255).astype(np.uint8)  # noqa: E731
    return q(y), q(sub(u)), q(sub(v))


def write_yuv420(path, frames: Sequence[np.ndarray]) -> None:
    with open(path, "wb") as fh:
        for rgb in frames:
            yuv420_frame_size(rgb.shape[1], rgb.shape[0])
            for plane in rgb_to_yuv420(rgb):
                fh.write(plane.tobytes())


# --- views -----------------------------------------------------------------


def _load(path, gray: bool, yuv_size: Optional[tuple[int, int]], frame: int) -> np.ndarray:
    if Path(path).suffix.lower() == ".yuv":
        if yuv_size is None:
            raise FormatError(f"{path}: raw YUV input needs an explicit width and height")
        y, u, v = read_yuv420_planes(path, yuv_size[0], yuv_size[1], frame)
        return y.copy() if gray else yuv420_to_rgb(y, u, v)
    return read_image(path, gray=gray)


def read_view(
    texture_path,
    depth_path,
    cam: CameraParams,
    yuv_size: Optional[tuple[int, int]] = None,
    frame: int = 0,
) -> View:
    """Load one view.  A ``.yuv`` depth file contributes its luma plane."""
    tex = _load(texture_path, False, yuv_size, frame)
    dep = _load(depth_path, True, yuv_size, frame)
    if tex.shape[:2] != dep.shape:
        raise FormatError(
            f"texture {texture_path} is {tex.shape[1]}x{tex.shape[0]} but depth "
            f"{depth_path} is {dep.shape[1]}x{dep.shape[0]}"
        )
    return View(tex, dep, cam)


def write_view(view: View, texture_path, depth_path) -> None:
    write_image(texture_path, view.texture)
    write_image(depth_path, view.depth)


# --- camera rigs -----------------------------------------------------------

RIG_FIELDS = ("view_id", "baseline_pos", "focal_length_px", "z_near", "z_far")


def parse_rig(text: str, source: str = "<rig>") -> list[CameraParams]:
    """Parse ``view_id baseline_pos focal_length_px z_near z_far`` lines.

    Fields may be separated by commas and/or whitespace; ``#`` starts a
    comment.
    """
    cams: list[CameraParams] = []
    seen: dict[int, int] = {}
    focal = None
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = [p for p in re.split(r"[,\s]+", line) if p]
        if len(parts) != len(RIG_FIELDS):
            raise FormatError(f"{source}:{n}: expected {len(RIG_FIELDS)} fields, got {len(parts)}")
        try:
            vid = int(parts[0])
            b, f, zn, zf = (float(p) for p in parts[1:])
        except ValueError:
            raise FormatError(f"{source}:{n}: non-numeric field in {line!r}") from None
        if vid in seen:
            raise FormatError(f"{source}:{n}: duplicate view id {vid} (first on line {seen[vid]})")
        if focal is not None and f != focal:
            raise FormatError(f"{source}:{n}: focal length {f} differs from {focal}")
        try:
            cams.append(CameraParams(vid, f, b, zn, zf))
        except GeometryError as e:
            raise FormatError(f"{source}:{n}: {e}") from None
        seen[vid] = n
        focal = f
    if not cams:
        raise FormatError(f"{source}: rig file defines no cameras")
    return cams


def read_rig(path) -> list[CameraParams]:
    return parse_rig(Path(path).read_text(), str(path))


def format_rig(cams: Sequence[CameraParams]) -> str:
    check_rig(cams)
    lines = ["# " + " ".join(RIG_FIELDS)]
    for c in cams:
        lines.append(f"{c.view_id} {c.baseline_pos!r} {c.focal_length_px!r} {c.z_near!r} {c.z_far!r}")
    return "\n".join(lines) + "\n"


def write_rig(path, cams: Sequence[CameraParams]) -> None:
    Path(path).write_text(format_rig(cams))


# --- diagnostics -----------------------------------------------------------


def hole_overlay(view: WarpedView) -> np.ndarray:
    out = view.texture.copy()
    out[view.hole_mask] = GREEN
    return out


def write_hole_overlay(view: WarpedView, path) -> None:
    """PNG of the texture with hole pixels painted pure green."""
    Image.fromarray(hole_overlay(view)).save(Path(path), format="PNG")


def write_mask(path, mask: np.ndarray) -> None:
    write_image(path, np.where(mask, 255, 0).astype(np.uint8))


def read_mask(path) -> np.ndarray:
    m = read_image(path, gray=True)
    if not np.isin(m, (0, 255)).all():
        raise FormatError(f"{path}: mask must contain only 0 and 255")
    return m == 255
