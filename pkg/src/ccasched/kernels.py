"""Kernel backend selection.

The compiled extension is used when it was built; set
``CCASCHED_PURE_PYTHON=1`` to force the numpy fallback.
"""

from __future__ import annotations

import os

from . import _kernels_py

python_best_split = _kernels_py.best_split

try:
    from ._kernels import best_split as compiled_best_split
except ImportError:  # extension not built
    compiled_best_split = None

if compiled_best_split is not None and not os.environ.get("CCASCHED_PURE_PYTHON"):
    best_split = compiled_best_split
    BACKEND = "cython"
else:
    best_split = python_best_split
    BACKEND = "python"

__all__ = ["best_split", "python_best_split", "compiled_best_split", "BACKEND"]
