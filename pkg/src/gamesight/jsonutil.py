"""Canonical JSON encoding and stable seeding helpers.

Every document this package persists or serves must serialize to the same
bytes given the same inputs, so replayed state can be compared to live state
byte for byte. Dicts are emitted in insertion order (the schema order), with
compact separators and no NaN/Infinity.
"""

import json
import zlib


def canonical_dumps(obj) -> str:
    return json.dumps(obj, separators=(",", ":"), allow_nan=False)


def canonical_line(obj) -> str:
    """One JSON document on one line, newline terminated."""
    return canonical_dumps(obj) + "\n"


def stable_seed(*parts) -> int:
    """Deterministic 32-bit seed from identifying strings/numbers.

    Python's hash() is salted per process, so derive seeds from crc32 of the
    canonical text instead. Used to make bootstrap resampling reproducible
    across replays.
    """
    text = "|".join(str(p) for p in parts)
    return zlib.crc32(text.encode("utf-8"))
