"""Hot-loop kernels with a compiled fast path.

The compiled extension (``_speedups``, Cython) is used when it is built;
otherwise the pure-NumPy reference in ``_ref`` takes over.  Both expose the
same functions with identical semantics.  Set ``MVNEWTON_BACKEND=python``
to force the fallback, or ``MVNEWTON_BACKEND=compiled`` to fail loudly
when the extension is missing.
"""

import os

_requested = os.environ.get("MVNEWTON_BACKEND", "auto").strip().lower()

if _requested in ("auto", "", "compiled", "cython", "c"):
    try:
        from . import _speedups as _impl
        BACKEND = "compiled"
    except ImportError:
        if _requested not in ("auto", ""):
            raise ImportError(
                "MVNEWTON_BACKEND requested the compiled backend, but the "
                "extension is not built; reinstall with a C compiler or "
                "unset the variable") from None
        from . import _ref as _impl
        BACKEND = "python"
elif _requested in ("python", "numpy", "ref", "pure"):
    from . import _ref as _impl
    BACKEND = "python"
else:
    raise ValueError(f"unrecognized MVNEWTON_BACKEND={_requested!r}; "
                     f"use 'compiled' or 'python'")

dd_line_sweep = _impl.dd_line_sweep
eval_newton_batch = _impl.eval_newton_batch
eval_newton_diff_batch = _impl.eval_newton_diff_batch


def backend_module(name: str):
    """Fetch a specific backend by name ('compiled' or 'python').

    Used by the backend comparison benchmark; raises ImportError when the
    compiled extension is unavailable.
    """
    name = name.strip().lower()
    if name in ("python", "numpy", "ref", "pure"):
        from . import _ref
        return _ref
    if name in ("compiled", "cython", "c"):
        from . import _speedups
        return _speedups
    raise ValueError(f"unknown backend {name!r}")


def available_backends():
    names = ["python"]
    try:
        from . import _speedups  # noqa: F401
        names.insert(0, "compiled")
    except ImportError:
        pass
    return names
