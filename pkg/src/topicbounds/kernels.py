"""Kernel selection.

The compiled extension is used when it imports; otherwise, or when the
environment variable ``TOPICBOUNDS_PURE`` is set to a non-empty value other
than ``0``, the numpy fallback is used.  Both produce identical output.
"""

import os

from . import _fallback

BACKENDS = {"python": _fallback}

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None
else:
    BACKENDS["cython"] = _compiled

_forced_pure = os.environ.get("TOPICBOUNDS_PURE", "") not in ("", "0")

if _compiled is not None and not _forced_pure:
    BACKEND = "cython"
else:
    BACKEND = "python"

sample_word_counts = BACKENDS[BACKEND].sample_word_counts


def get_backend(name=None):
    """Return the kernel module ``name`` ('cython' or 'python'), or the active one."""
    if name is None:
        name = BACKEND
    try:
        return BACKENDS[name]
    except KeyError:
        raise ImportError(f"kernel backend {name!r} is not available") from None
