"""Kernel backend selection.

The hot inner loops (F_q Gaussian elimination and scaled-intersection
sums) exist twice: a Cython extension ``_core`` and a pure-Python twin
``_pyref`` with identical semantics.  The extension is used when it
imported successfully and the environment variable RSREPAIR_PURE is not
set to "1".  ``benchmarks/bench_kernels.py`` compares the two.
"""

from __future__ import annotations

import os

from . import _pyref as pyref

native = None
if os.environ.get("RSREPAIR_PURE") != "1":
    try:
        from . import _core as native  # type: ignore[no-redef]
    except ImportError:
        native = None

BACKEND = "native" if native is not None else "python"


def backend() -> str:
    return BACKEND
