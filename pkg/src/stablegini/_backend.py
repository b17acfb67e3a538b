"""Kernel backend selection.

The compiled extension is used when it imports cleanly; otherwise the
pure-Python twin takes over.  Setting ``STABLE_GINI_PURE_PYTHON=1`` forces
the fallback, which is how the test suite exercises both paths.
"""

import os
from types import SimpleNamespace

from scipy import LowLevelCallable

from . import _pykernels


def _python_backend():
    return SimpleNamespace(
        name="python",
        pdf_integrand=_pykernels.pdf_integrand,
        cdf_integrand=_pykernels.cdf_integrand,
        tail_series=_pykernels.tail_series,
    )


def _compiled_backend():
    from . import _kernels

    return SimpleNamespace(
        name="cython",
        pdf_integrand=LowLevelCallable.from_cython(_kernels, "pdf_integrand"),
        cdf_integrand=LowLevelCallable.from_cython(_kernels, "cdf_integrand"),
        tail_series=_kernels.tail_series,
    )


def load(name=None):
    """Return the kernel namespace for ``name`` ("cython", "python" or None for the default)."""
    if name == "python":
        return _python_backend()
    if name == "cython":
        return _compiled_backend()
    if os.environ.get("STABLE_GINI_PURE_PYTHON", "") not in ("", "0"):
        return _python_backend()
    try:
        return _compiled_backend()
    except ImportError:
        return _python_backend()


kernels = load()
BACKEND = kernels.name
