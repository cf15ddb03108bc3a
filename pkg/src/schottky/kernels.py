"""Backend selection for the word-tree scan.

The compiled extension is used when it has been built; set
``SCHOTTKY_PURE_PYTHON=1`` to force the pure-Python twin.
"""

import os

from . import _kernels_py

BACKEND = "python"
scan_words = _kernels_py.scan_words

if not os.environ.get("SCHOTTKY_PURE_PYTHON"):
    try:
        from ._kernels import scan_words  # noqa: F811
        BACKEND = "cython"
    except ImportError:
        pass

__all__ = ["BACKEND", "scan_words"]
