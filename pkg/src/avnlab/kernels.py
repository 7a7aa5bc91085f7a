"""Back-end selection for the hot loops.

The compiled ``_ckernels`` extension is used when it imports; otherwise the
pure-Python ``_pykernels`` module is. Setting ``AVNLAB_PURE_PYTHON=1`` forces
the fallback. ``BACKEND`` names the module actually in use.
"""

from __future__ import annotations

import os

from avnlab import _pykernels

if os.environ.get("AVNLAB_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
else:
    try:
        from avnlab import _ckernels as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _pykernels

BACKEND = "cython" if _impl is not _pykernels else "python"

pauli_apply = _impl.pauli_apply
scan_equations = _impl.scan_equations
scan_bound = _impl.scan_bound
sample_outcomes = _impl.sample_outcomes


def available_backends() -> dict:
    """Map backend name to module for every importable implementation."""
    found = {"python": _pykernels}
    try:
        from avnlab import _ckernels
    except ImportError:
        pass
    else:
        found["cython"] = _ckernels
    return found
