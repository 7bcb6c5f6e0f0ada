"""Numba switch.

Set ``QQBELL_DISABLE_NUMBA=1`` to force the pure-numpy kernels. If numba
cannot be imported the numpy kernels are used regardless.
"""
import os

_FALSY = {"", "0", "false", "no", "off"}

NUMBA_REQUESTED = os.environ.get("QQBELL_DISABLE_NUMBA", "").strip().lower() in _FALSY

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - depends on the environment
    numba = None
    HAVE_NUMBA = False

NUMBA_ENABLED = NUMBA_REQUESTED and HAVE_NUMBA


def njit(func=None, **kwargs):
    """``numba.njit(cache=True)`` when numba is installed, identity otherwise.

    Kernels are always compiled when numba is importable so that both
    backends stay callable in one process (tests compare them); the env flag
    only selects the default backend.
    """
    kwargs.setdefault("cache", True)

    def wrap(f):
        if not HAVE_NUMBA:
            return f
        return numba.njit(**kwargs)(f)

    if func is not None:
        return wrap(func)
    return wrap


def default_backend():
    return "numba" if NUMBA_ENABLED else "numpy"


def resolve_backend(backend):
    if backend is None:
        return default_backend()
    if backend not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {backend!r}; expected 'numba' or 'numpy'")
    if backend == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba backend requested but numba is not installed")
    return backend
