"""Round-evaluation backends.

The hot path of the online loop (feature evaluation + per-kernel
predictions for the selected kernel subset) has two interchangeable
implementations: a compiled Cython core and a pure-NumPy fallback. The
compiled one is preferred when importable; set GRAPHMKL_BACKEND=python to
force the fallback.
"""
import os

from . import python as _python_backend

BACKEND_NAME = "python"
evaluate_subset = _python_backend.evaluate_subset

if os.environ.get("GRAPHMKL_BACKEND", "").lower() != "python":
    try:
        from . import _fast as _fast_backend

        evaluate_subset = _fast_backend.evaluate_subset
        BACKEND_NAME = "cython"
    except ImportError:
        pass
