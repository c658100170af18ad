"""Backend selection for the hot pair-sum loops.

The compiled extension is preferred; the numpy implementation is the drop-in
fallback.  ``BACKEND`` names whichever one was picked so callers and the
benchmark can report it.
"""

try:
    from . import _kernels as _impl
except ImportError:  # pragma: no cover - exercised only on fallback installs
    from . import _kernels_np as _impl

from . import _kernels_np as numpy_impl

BACKEND = _impl.BACKEND
pair_sum = _impl.pair_sum
raster_sum = _impl.raster_sum
