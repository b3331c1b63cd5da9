"""Selects the compiled core or the numpy fallback at import time.

The compiled extension (kpls._core, Cython) implements the per-component
hot kernels: gram assembly, the kernel deflation sweep, and double
centering. When it is not built, the numpy versions in
kpls._core_fallback are used; results agree to floating-point roundoff.

KPLS_BACKEND=compiled|numpy|auto overrides the choice (default auto).
"""

import os

from .errors import InvalidInputError

_requested = os.environ.get("KPLS_BACKEND", "auto").lower()
if _requested not in ("auto", "compiled", "numpy"):
    raise InvalidInputError(
        f"KPLS_BACKEND must be auto, compiled, or numpy (got {_requested!r})"
    )

if _requested == "numpy":
    from . import _core_fallback as _impl
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]
    except ImportError:
        if _requested == "compiled":
            raise InvalidInputError(
                "KPLS_BACKEND=compiled but the kpls._core extension is not built; "
                "reinstall with Cython and a C compiler available"
            ) from None
        from . import _core_fallback as _impl

rbf_gram = _impl.rbf_gram
linear_gram = _impl.linear_gram
deflate_inplace = _impl.deflate_inplace
center_inplace = _impl.center_inplace

IS_COMPILED = bool(_impl.IS_COMPILED)
NAME = "compiled" if IS_COMPILED else "numpy"
