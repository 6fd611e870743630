"""Global enumeration-effort cap, driven by DENDRON_MAX_WORK.

Enumeration loops call tick(); when the environment variable is set and the
budget runs out, WorkLimitExceeded is raised.  Unset means unlimited.
"""

from __future__ import annotations

import os

from .errors import WorkLimitExceeded

_counter = 0
_limit = None
_loaded = False


def _load():
    global _limit, _loaded
    raw = os.environ.get("DENDRON_MAX_WORK")
    _limit = int(raw) if raw else None
    _loaded = True


def reset():
    """Re-read the env var and zero the counter (used by the CLI and tests)."""
    global _counter
    _counter = 0
    _load()


def tick(n: int = 1):
    global _counter
    if not _loaded:
        _load()
    if _limit is None:
        return
    _counter += n
    if _counter > _limit:
        raise WorkLimitExceeded("enumeration budget exhausted", limit=_limit)
