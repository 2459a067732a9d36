"""Self-supervised restoration of turbulence-distorted image sequences.

The heavy lifting lives in the compiled extension; this package re-exports
its public surface.
"""

from ._core import (
    __version__,
    background_variance,
    gaussian_blur,
    grid_for_block_size,
    psnr,
    restore,
    schedule_blocks,
    shuffle,
    ssim,
    synthesize,
    tv,
    unshuffle,
)

__all__ = [
    "__version__",
    "background_variance",
    "gaussian_blur",
    "grid_for_block_size",
    "psnr",
    "restore",
    "schedule_blocks",
    "shuffle",
    "ssim",
    "synthesize",
    "tv",
    "unshuffle",
]
