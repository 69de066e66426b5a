"""Opt-in expensive invariant checking inside solver loops.

When enabled, the solvers re-verify their loop invariants (EF1-ness of every
intermediate allocation, bundle contiguity, value monotonicity, permanent/
temporary set discipline) after each mutation. Off by default; the property
test suite switches it on. Also honours the FAIRDIV_DEBUG environment
variable at import time.
"""

import os

_enabled = os.environ.get("FAIRDIV_DEBUG", "") not in ("", "0")


def checks_enabled() -> bool:
    return _enabled


def set_debug_checks(flag: bool) -> None:
    global _enabled
    _enabled = bool(flag)
