"""Binary persistence of per-prime trace grids.

Layout (little-endian): magic b"STAP", u8 version, u64 p, then p*p signed
32-bit traces row-major by a then b, then a CRC-32 of the payload.  Bad
reduction is stored as the sentinel -2^31, far outside the Hasse range for
any feasible p; the nodal/cuspidal detail is rederived on load when a full
trace grid is requested.
"""

from __future__ import annotations

import os
import struct
import zlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .arith_curves import ApTable, _classify_singular, Reduction
from .errors import CacheError

__all__ = ["CacheEntry", "SENTINEL", "cache_write", "cache_read", "cache_path", "entry_from_table", "table_from_entry"]

MAGIC = b"STAP"
VERSION = 1
SENTINEL = -(2 ** 31)
_HEADER = struct.Struct("<4sBQ")

ENV_CACHE_DIR = "STMOMENTS_CACHE_DIR"


@dataclass
class CacheEntry:
    p: int
    ap: np.ndarray  # int32, SENTINEL at bad-reduction pairs


def cache_path(cache_dir: str | Path | None, p: int) -> Path:
    base = Path(cache_dir or os.environ.get(ENV_CACHE_DIR, ".stmoments-cache"))
    return base / f"ap_{p}.stap"


def entry_from_table(table: ApTable) -> CacheEntry:
    ap = table.ap.astype(np.int32)
    ap[~table.good] = SENTINEL
    return CacheEntry(p=table.p, ap=ap)


def table_from_entry(entry: CacheEntry) -> ApTable:
    """Rebuild the full grid; singular pairs are reclassified (cheap: there
    are exactly p of them)."""
    p = entry.p
    ap = entry.ap.astype(np.int64)
    kind = np.zeros((p, p), dtype=np.uint8)
    bad_a, bad_b = np.nonzero(entry.ap == SENTINEL)
    for a, b in zip(bad_a, bad_b):
        tv = _classify_singular(p, int(a), int(b))
        ap[a, b] = tv.ap
        kind[a, b] = 1 if tv.kind is Reduction.NODE else 2
    ap.setflags(write=False)
    kind.setflags(write=False)
    return ApTable(p=p, ap=ap, kind=kind)


def cache_write(entry: CacheEntry, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = np.ascontiguousarray(entry.ap, dtype="<i4").tobytes()
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, entry.p))
        fh.write(payload)
        fh.write(struct.pack("<I", zlib.crc32(payload)))


def cache_read(path: str | Path) -> CacheEntry:
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < _HEADER.size + 4:
        raise CacheError("file too short to be a trace cache")
    magic, version, p = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise CacheError(f"bad magic {magic!r}")
    if version != VERSION:
        raise CacheError(f"unsupported version {version}")
    expected = _HEADER.size + 4 * p * p + 4
    if len(raw) != expected:
        raise CacheError(f"size mismatch: got {len(raw)}, expected {expected}")
    payload = raw[_HEADER.size:-4]
    (crc,) = struct.unpack_from("<I", raw, len(raw) - 4)
    if zlib.crc32(payload) != crc:
        raise CacheError("checksum mismatch")
    ap = np.frombuffer(payload, dtype="<i4").reshape(p, p).astype(np.int32)
    return CacheEntry(p=int(p), ap=ap)
