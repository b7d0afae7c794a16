"""Backend selection for the fusion kernel.

The compiled extension is used when it was built; set ``CSD_PURE_PYTHON=1``
to force the numpy implementation.
"""

from __future__ import annotations

import importlib
import os
from types import ModuleType

BACKENDS = {"cython": "csd._kernels", "python": "csd._kernels_py"}


def load_backend(name: str) -> ModuleType:
    try:
        return importlib.import_module(BACKENDS[name])
    except KeyError:
        raise ValueError(f"unknown kernel backend {name!r}") from None


def available_backends() -> list[str]:
    found = []
    for name in BACKENDS:
        try:
            load_backend(name)
        except ImportError:
            continue
        found.append(name)
    return found


def _select() -> tuple[str, ModuleType]:
    if not os.environ.get("CSD_PURE_PYTHON"):
        try:
            return "cython", load_backend("cython")
        except ImportError:
            pass
    return "python", load_backend("python")


BACKEND, _module = _select()
filtered_statistics = _module.filtered_statistics
