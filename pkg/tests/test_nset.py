import random
import struct

import pytest

from normalsets import (
    NsetFormatError,
    SetBitset,
    SignAssignment,
    a_q_set,
    nset_from_bytes,
    nset_to_bytes,
    read_nset,
    write_nset,
)
from normalsets.nset import HEADER_LEN, MAGIC


@pytest.mark.parametrize("limit", [1, 7, 8, 9, 64, 1000])
def test_round_trip_limits(limit):
    rng = random.Random(limit)
    members = [n for n in range(1, limit + 1) if rng.random() < 0.5]
    bits = SetBitset.from_members(limit, members)
    blob = nset_to_bytes(bits)
    assert len(blob) == HEADER_LEN + (limit + 7) // 8
    back = nset_from_bytes(blob)
    assert back == bits
    assert nset_to_bytes(back) == blob


def test_round_trip_large(table):
    bits = a_q_set(SignAssignment(0), 1_000_000, table)
    blob = nset_to_bytes(bits)
    assert nset_from_bytes(blob) == bits


def test_header_bytes():
    bits = SetBitset.from_members(10, [1, 10])
    blob = nset_to_bytes(bits)
    assert blob[:4] == MAGIC == b"NSET"
    assert blob[4] == 1
    assert struct.unpack("<Q", blob[5:13])[0] == 10
    assert blob[13:] == bytes([0b00000001, 0b00000010])


def test_file_round_trip(tmp_path):
    bits = SetBitset.from_members(100, range(2, 101, 2))
    path = tmp_path / "evens.nset"
    write_nset(path, bits)
    assert read_nset(path) == bits
    assert path.read_bytes()[:4] == b"NSET"


def good_blob():
    return nset_to_bytes(SetBitset.from_members(10, [1, 3, 10]))


def test_truncated_header():
    with pytest.raises(NsetFormatError, match="truncated header"):
        nset_from_bytes(good_blob()[:12])
    with pytest.raises(NsetFormatError, match="got 0"):
        nset_from_bytes(b"")


def test_bad_magic():
    blob = b"XSET" + good_blob()[4:]
    with pytest.raises(NsetFormatError, match="bad magic at offset 0"):
        nset_from_bytes(blob)


def test_bad_version():
    blob = bytearray(good_blob())
    blob[4] = 2
    with pytest.raises(NsetFormatError, match="version 2 at offset 4"):
        nset_from_bytes(bytes(blob))


def test_short_payload():
    with pytest.raises(NsetFormatError, match="expected 2 bytes from offset 13"):
        nset_from_bytes(good_blob()[:-1])


def test_trailing_data():
    with pytest.raises(NsetFormatError, match="trailing data at offset 15"):
        nset_from_bytes(good_blob() + b"\x00")


def test_nonzero_padding():
    blob = bytearray(good_blob())
    blob[-1] |= 0b10000000  # bit 15 is past limit 10
    with pytest.raises(NsetFormatError, match="nonzero padding"):
        nset_from_bytes(bytes(blob))


def test_error_type_is_value_error():
    # callers that only catch ValueError still see parse failures
    assert issubclass(NsetFormatError, ValueError)
