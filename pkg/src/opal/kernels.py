"""Selects the compiled rank kernel when available.

Set ``OPAL_PURE_PYTHON=1`` to force the pure-Python fallback.
"""

from __future__ import annotations

import os

from . import _rank_py

BACKEND = "python"
rank_mod_p = _rank_py.rank_mod_p

if os.environ.get("OPAL_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _rankcore
    except ImportError:
        pass
    else:
        rank_mod_p = _rankcore.rank_mod_p
        BACKEND = "cython"

__all__ = ["BACKEND", "rank_mod_p"]
