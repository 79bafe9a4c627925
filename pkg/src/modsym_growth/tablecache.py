"""Binary persistence for generator tables.

Layout (big endian): magic b"MSGT", u16 version, u64 level, u64 coset
count, u64 generator count, then the transversal followed by the
generators, each matrix as four integers. An integer is a u32 byte length
followed by that many bytes of two's complement.
"""

from __future__ import annotations

import os
import struct
from pathlib import Path

from .arith import GroupElement
from .errors import ParseError
from .words import GeneratorTable, coset_table, table_from_data

MAGIC = b"MSGT"
VERSION = 1
CACHE_ENV = "MODSYM_CACHE_DIR"


def _pack_int(n: int) -> bytes:
    raw = n.to_bytes((n.bit_length() + 8) // 8, "big", signed=True)
    return struct.pack(">I", len(raw)) + raw


def _pack_matrix(g: GroupElement) -> bytes:
    return b"".join(_pack_int(x) for x in g.entries)


def dumps(table: GeneratorTable) -> bytes:
    head = MAGIC + struct.pack(">HQQQ", VERSION, table.level, table.index, len(table.generators))
    body = b"".join(_pack_matrix(g) for g in table.transversal)
    body += b"".join(_pack_matrix(g) for g in table.generators)
    return head + body


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise ParseError("truncated table file")
        chunk = self.data[self.pos : self.pos + n]
        self.pos += n
        return chunk

    def integer(self) -> int:
        (size,) = struct.unpack(">I", self.take(4))
        return int.from_bytes(self.take(size), "big", signed=True)

    def matrix(self) -> GroupElement:
        try:
            return GroupElement(*(self.integer() for _ in range(4)))
        except ValueError as exc:
            raise ParseError(f"corrupt matrix in table file: {exc}") from None


def loads(data: bytes) -> GeneratorTable:
    r = _Reader(data)
    if r.take(4) != MAGIC:
        raise ParseError("not a generator table file")
    version, level, n_cosets, n_gens = struct.unpack(">HQQQ", r.take(26))
    if version != VERSION:
        raise ParseError(f"unsupported table version {version}")
    transversal = [r.matrix() for _ in range(n_cosets)]
    generators = [r.matrix() for _ in range(n_gens)]
    if r.pos != len(data):
        raise ParseError("trailing bytes in table file")
    return table_from_data(level, transversal, generators)


def cache_path(directory, level: int) -> Path:
    return Path(directory) / f"gamma0_{level}.msgt"


def load_table(level: int, directory=None) -> GeneratorTable:
    """Generator table for Gamma0(level), read from or written to the cache directory if set."""
    directory = directory if directory is not None else os.environ.get(CACHE_ENV)
    if not directory:
        return coset_table(level)
    path = cache_path(directory, level)
    if path.exists():
        table = loads(path.read_bytes())
        if table.level == level:
            return table
    table = coset_table(level)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    tmp.write_bytes(dumps(table))
    tmp.replace(path)
    return table
