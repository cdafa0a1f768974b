"""Hexagonal-lattice wavelets: filter banks, pyramids and compression."""

from ._hexwave import (
    CompressError,
    FilterBank,
    FilterError,
    Pyramid,
    TransformError,
    analyze,
    check_pr,
    classify,
    compress,
    known_methods,
    load_bank,
    load_pyramid,
    make_bank,
    psnr,
    read_image,
    synthesize,
)

__all__ = [
    "CompressError",
    "FilterBank",
    "FilterError",
    "Pyramid",
    "TransformError",
    "analyze",
    "check_pr",
    "classify",
    "compress",
    "known_methods",
    "load_bank",
    "load_pyramid",
    "make_bank",
    "psnr",
    "read_image",
    "synthesize",
]
