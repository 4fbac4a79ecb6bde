"""Engine clock: RFC 3339 UTC timestamps, second precision.

Honors SOURCE_DATE_EPOCH (the reproducible-builds convention) so scripted
runs can produce byte-identical plan files. Tests may also install an
explicit override with :func:`set_fixed_now`.
"""

from __future__ import annotations

import os
from datetime import datetime, timezone

_fixed: str | None = None


def set_fixed_now(timestamp: str | None) -> None:
    """Freeze (or unfreeze, with None) the timestamp returned by now()."""
    global _fixed
    _fixed = timestamp


def now() -> str:
    if _fixed is not None:
        return _fixed
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch:
        dt = datetime.fromtimestamp(int(epoch), tz=timezone.utc)
    else:
        dt = datetime.now(tz=timezone.utc)
    return dt.strftime("%Y-%m-%dT%H:%M:%SZ")
