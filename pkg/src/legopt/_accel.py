"""Backend selection for the hot kernels.

Numba is used when importable unless ``LEGOPT_DISABLE_NUMBA`` is set to a
truthy value, in which case every kernel falls back to its pure-numpy twin.
The flag is read once at import time.
"""

import os

_FALSY = {"", "0", "false", "no", "off"}


def _flag_set(name):
    return os.environ.get(name, "").strip().lower() not in _FALSY


try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not _flag_set("LEGOPT_DISABLE_NUMBA")
BACKEND = "numba" if USE_NUMBA else "numpy"


def njit(*args, **kwargs):
    """``numba.njit`` when available, otherwise an identity decorator.

    Kernels decorated here are always compiled if numba is importable, so
    tests can compare both paths regardless of the env flag.
    """
    if HAVE_NUMBA:
        return numba.njit(*args, **kwargs)

    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]

    def wrap(fn):
        return fn

    return wrap
