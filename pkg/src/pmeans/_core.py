"""Backend selection for the trajectory kernels.

The compiled extension is used when it imports; otherwise, or when
``PMEANS_PURE=1`` is set, the pure-Python kernels are used. Both give
bit-identical output.
"""

import os

from . import _fallback

if os.environ.get("PMEANS_PURE", "") not in ("", "0"):
    _impl = _fallback
else:
    try:
        from . import _kernels as _impl
    except ImportError:  # extension not built
        _impl = _fallback

BACKEND = "compiled" if _impl is not _fallback else "python"

draw_target = _impl.draw_target
draw_targets = _impl.draw_targets
simulate_jump = _impl.simulate_jump
simulate_xtilde = _impl.simulate_xtilde
