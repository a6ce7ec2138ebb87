"""Transfer-size lists: ``64,128,4K`` or ranges like ``64..1MiB:x2``."""

from __future__ import annotations

import re

_UNITS = {"": 1, "b": 1, "k": 1 << 10, "kib": 1 << 10, "kb": 1 << 10,
          "m": 1 << 20, "mib": 1 << 20, "mb": 1 << 20,
          "g": 1 << 30, "gib": 1 << 30, "gb": 1 << 30}
_SIZE = re.compile(r"^\s*(\d+)\s*([a-zA-Z]*)\s*$")
_RANGE = re.compile(r"^(.+?)\.\.(.+?)(?::x(\d+))?$")


def parse_size(text: str) -> int:
    m = _SIZE.match(text)
    if not m or m.group(2).lower() not in _UNITS:
        raise ValueError(f"bad size {text!r}")
    return int(m.group(1)) * _UNITS[m.group(2).lower()]


def parse_sizes(spec: str) -> list[int]:
    """Sorted, de-duplicated byte sizes; ranges are geometric and include both ends when hit."""
    out: set[int] = set()
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        m = _RANGE.match(part)
        if m:
            lo, hi = parse_size(m.group(1)), parse_size(m.group(2))
            factor = int(m.group(3) or 2)
            if lo < 1 or hi < lo or factor < 2:
                raise ValueError(f"bad size range {part!r}")
            s = lo
            while s <= hi:
                out.add(s)
                s *= factor
        else:
            out.add(parse_size(part))
    if not out or min(out) < 1:
        raise ValueError(f"no positive sizes in {spec!r}")
    return sorted(out)
