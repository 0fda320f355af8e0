"""Select the search-kernel implementation at import time.

The compiled Cython kernel is preferred; the NumPy fallback is used when the
extension is unavailable.  Set ``CSITRACK_BACKEND=python`` or ``=compiled``
to force a choice (forcing an unavailable compiled kernel raises).
"""

from __future__ import annotations

import os

from . import _profile_py

try:
    from . import _profile_kernel as _compiled
except ImportError:  # pragma: no cover - build-environment dependent
    _compiled = None

_requested = os.environ.get("CSITRACK_BACKEND", "").strip().lower()

if _requested in ("python", "py"):
    BACKEND = "python"
elif _requested in ("compiled", "c", "cython"):
    if _compiled is None:
        raise ImportError(
            "CSITRACK_BACKEND=compiled requested but the compiled kernel is "
            "not available; rebuild the extension or unset the variable"
        )
    BACKEND = "compiled"
elif _requested == "":
    BACKEND = "compiled" if _compiled is not None else "python"
else:
    raise ValueError(f"unknown CSITRACK_BACKEND value {_requested!r}")

if BACKEND == "compiled":
    minimize_profile = _compiled.minimize_profile
else:
    minimize_profile = _profile_py.minimize_profile


def available_backends() -> dict:
    """Name -> minimize_profile callable for every importable backend."""
    out = {"python": _profile_py.minimize_profile}
    if _compiled is not None:
        out["compiled"] = _compiled.minimize_profile
    return out
