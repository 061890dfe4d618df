"""NSET: a tiny container for membership bitsets.

Layout: 4-byte magic "NSET", one version byte, the limit as an 8-byte
little-endian unsigned integer, then ceil(limit/8) payload bytes.  Bit
n-1 (LSB-first within each byte) is the membership of integer n; padding
bits past the limit are zero.  Round-trips are byte-exact.
"""

from __future__ import annotations

import struct

import numpy as np

from .errors import NsetFormatError
from .signs import SetBitset

MAGIC = b"NSET"
VERSION = 1
HEADER_LEN = 13


def nset_to_bytes(bits: SetBitset) -> bytes:
    header = MAGIC + bytes([VERSION]) + struct.pack("<Q", bits.limit)
    return header + bits.payload.tobytes()


def nset_from_bytes(data: bytes) -> SetBitset:
    if len(data) < HEADER_LEN:
        raise NsetFormatError(
            f"truncated header: need {HEADER_LEN} bytes, got {len(data)}"
        )
    if data[:4] != MAGIC:
        raise NsetFormatError(f"bad magic at offset 0: {data[:4]!r}")
    version = data[4]
    if version != VERSION:
        raise NsetFormatError(f"unsupported version {version} at offset 4")
    limit = struct.unpack("<Q", data[5:13])[0]
    expected = (limit + 7) // 8
    got = len(data) - HEADER_LEN
    if got < expected:
        raise NsetFormatError(
            f"payload shorter than the header limit implies: expected {expected} "
            f"bytes from offset {HEADER_LEN}, found {got}"
        )
    if got > expected:
        raise NsetFormatError(f"trailing data at offset {HEADER_LEN + expected}")
    payload = np.frombuffer(data, dtype=np.uint8, offset=HEADER_LEN).copy()
    if limit % 8 and payload.size and int(payload[-1]) >> (limit % 8):
        raise NsetFormatError(
            f"nonzero padding bits in the final byte at offset {len(data) - 1}"
        )
    return SetBitset(limit, payload)


def write_nset(path, bits: SetBitset) -> None:
    with open(path, "wb") as fh:
        fh.write(nset_to_bytes(bits))


def read_nset(path) -> SetBitset:
    with open(path, "rb") as fh:
        return nset_from_bytes(fh.read())
