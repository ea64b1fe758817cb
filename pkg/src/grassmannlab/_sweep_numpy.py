"""Pure NumPy fallback for the sweep inner loop.

Same contract as the compiled kernel: windowed max-times circular
correlation of a nonnegative profile with the cosine kernel.  A strided view
over the wrap-extended profile avoids materializing the full N x N matrix.
"""

from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import as_strided


def max_correlate(ext: np.ndarray, kernel_full: np.ndarray, out: np.ndarray) -> np.ndarray:
    """``out[j] = max_m ext[j + m] * kernel_full[m]`` over the full window.

    ``ext`` has ``half`` wrapped samples on each side; ``kernel_full`` covers
    offsets ``-half..half`` so the window at j starts at ``ext[j]``.
    """
    n = out.shape[0]
    w = kernel_full.shape[0]
    stride = ext.strides[0]
    windows = as_strided(ext, shape=(n, w), strides=(stride, stride))
    np.max(windows * kernel_full, axis=1, out=out)
    return out
