"""Grid-scan kernels with a compiled fast path.

``EQFORGE_KERNEL=python`` forces the pure-Python backend; otherwise the
Cython extension is used when it was built. Both backends implement the
same functions with bit-identical arithmetic.
"""

import os

from . import _grid_py

_forced = os.environ.get("EQFORGE_KERNEL", "").lower()
if _forced in ("py", "python"):
    _backend = _grid_py
else:
    try:
        from . import _grid_fast as _backend  # type: ignore[no-redef]
    except ImportError:
        _backend = _grid_py

BACKEND = "python" if _backend is _grid_py else "cython"

accuracy_from_totals = _grid_py.accuracy_from_totals
profile_accuracy = _backend.profile_accuracy
deviation_gains = _backend.deviation_gains
scan_equilibria = _backend.scan_equilibria


def backends():
    """(name, module) pairs of every importable backend, for benchmarks."""
    found = [("python", _grid_py)]
    try:
        from . import _grid_fast

        found.append(("cython", _grid_fast))
    except ImportError:
        pass
    return found
