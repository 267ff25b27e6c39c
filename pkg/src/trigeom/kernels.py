"""Backend selection for the polygon kernels.

The compiled extension is preferred; the numpy module is the fallback when
the extension was not built. ``active`` is the module every caller uses.
"""

from types import ModuleType

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

BACKENDS: dict[str, ModuleType] = {"python": _pykernels}
if _ckernels is not None:
    BACKENDS["cython"] = _ckernels

active: ModuleType = _ckernels if _ckernels is not None else _pykernels


def get(name: str) -> ModuleType:
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"backend {name!r} not available; have {sorted(BACKENDS)}") from None
