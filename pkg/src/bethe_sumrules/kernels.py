"""Backend selection for the hot tree kernels.

The compiled extension ``_ckernels`` is used when it was built; otherwise the
numpy implementation in ``_pykernels`` is used.  Both expose ``schur_sweep``.
"""
from __future__ import annotations

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    BACKENDS["compiled"] = _ckernels

BACKEND = "compiled" if _ckernels is not None else "python"
_active = BACKENDS[BACKEND]


def use_backend(name: str) -> None:
    global BACKEND, _active
    if name not in BACKENDS:
        raise ValueError(f"backend {name!r} unavailable; have {sorted(BACKENDS)}")
    BACKEND, _active = name, BACKENDS[name]


def schur_sweep(v, zetas):
    return _active.schur_sweep(v, zetas)
