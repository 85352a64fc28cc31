"""Backend selection for the state-vector kernels.

The compiled extension is used when importable; set ``TRISPIN_KERNELS=python``
to force the numpy fallback. ``BACKEND`` names the active implementation.
"""
import os

import numpy as np

from . import _kernels_py as python_backend

compiled_backend = None
if os.environ.get("TRISPIN_KERNELS", "").lower() != "python":
    try:
        from . import _kernels_cy as compiled_backend
    except ImportError:  # extension not built
        compiled_backend = None

_impl = compiled_backend if compiled_backend is not None else python_backend
BACKEND = "cython" if compiled_backend is not None else "python"


def apply_pauli_sum(xs, zs, cs, v, out=None):
    """Return ``out + sum_t cs[t] X^xs[t] Z^zs[t] v`` (``out`` defaults to zeros).

    ``v`` may be real only when every coefficient is real.
    """
    v = np.ascontiguousarray(v)
    if out is None:
        out = np.zeros_like(v)
    _impl.apply_pauli_sum(
        np.ascontiguousarray(xs, dtype=np.uint64),
        np.ascontiguousarray(zs, dtype=np.uint64),
        np.ascontiguousarray(cs, dtype=np.complex128),
        v,
        out,
    )
    return out


def pauli_expectations(xs, zs, v):
    return _impl.pauli_expectations(
        np.ascontiguousarray(xs, dtype=np.uint64),
        np.ascontiguousarray(zs, dtype=np.uint64),
        np.ascontiguousarray(v, dtype=np.complex128),
    )


def rotate_site(psi, n, site, m):
    """In-place single-site rotation; ``psi`` must be contiguous complex128."""
    _impl.rotate_site(psi, n, site, np.ascontiguousarray(m, dtype=np.complex128))


def pair_concurrence_sum(psi, n, a, b):
    return float(_impl.pair_concurrence_sum(psi, n, a, b))
