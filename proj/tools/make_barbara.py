"""Rebuild data/barbara.pgm from the copy shipped in the sporco wheel.

usage: pip download sporco --no-deps -d /tmp/w && python tools/make_barbara.py /tmp/w/sporco-*.whl
The wheel carries a 702x574 colour version; we take BT.601 luma, rounded, and the
central 512x512 crop.
"""
import io
import sys
import zipfile
from pathlib import Path

import numpy as np
from PIL import Image


def main(wheel: str, out: str = "data/barbara.pgm") -> None:
    with zipfile.ZipFile(wheel) as z:
        rgb = np.asarray(Image.open(io.BytesIO(z.read("sporco/data/barbara.png"))).convert("RGB"), dtype=np.float64)
    y = 0.299 * rgb[..., 0] + 0.587 * rgb[..., 1] + 0.114 * rgb[..., 2]
    h, w = y.shape
    r0, c0 = (h - 512) // 2, (w - 512) // 2
    crop = np.clip(np.rint(y[r0:r0 + 512, c0:c0 + 512]), 0, 255).astype(np.uint8)
    Path(out).parent.mkdir(parents=True, exist_ok=True)
    with open(out, "wb") as f:
        f.write(b"P5\n512 512\n255\n")
        f.write(crop.tobytes())


if __name__ == "__main__":
    main(*sys.argv[1:])
