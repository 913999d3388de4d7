import os

from .errors import SizeCapError

ENV_MAX_N = "TNN_STABLE_MAX_N"


def size_cap(default: int) -> int:
    """Hard cap ``default``, lowered (never raised) by ``$TNN_STABLE_MAX_N``."""
    raw = os.environ.get(ENV_MAX_N, "").strip()
    if not raw:
        return default
    try:
        value = int(raw)
    except ValueError:
        return default
    return max(1, min(default, value))


def check_cap(size: int, default: int, what: str) -> None:
    cap = size_cap(default)
    if size > cap:
        raise SizeCapError(f"{what}: size {size} exceeds cap {cap}")
