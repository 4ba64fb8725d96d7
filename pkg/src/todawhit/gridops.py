"""Grid-evaluation backend selection.

Prefers the compiled extension; falls back to the NumPy implementation when
the extension was not built.  Both expose the same ``grid_sum`` contract and
agree to roundoff (the compiled path uses Kahan accumulation in index order,
the NumPy path pairwise summation, so results match to ~1e-14 relative).
"""

from __future__ import annotations

import os

from . import _gridref

try:  # pragma: no cover - depends on build environment
    from . import _gridcore

    _HAVE_CORE = True
except ImportError:  # pragma: no cover
    _gridcore = None
    _HAVE_CORE = False

if _HAVE_CORE and os.environ.get("TODAWHIT_PURE_PYTHON", "") != "1":
    BACKEND = "compiled"
    grid_sum = _gridcore.grid_sum
else:
    BACKEND = "numpy"
    grid_sum = _gridref.grid_sum


def backends() -> dict[str, object]:
    """All available grid_sum implementations, keyed by name."""
    out = {"numpy": _gridref.grid_sum}
    if _HAVE_CORE:
        out["compiled"] = _gridcore.grid_sum
    return out
