"""
Eval Cache Module
Persistent append-only log of engine evaluations.

Record layout: a ">I" payload length, a ">I" CRC32 of the payload, then
the UTF-8 JSON payload {"key": str, "lines": [[move, cp], ...]}. Records
are never rewritten; a truncated or corrupt trailing record is cut off
when the file is opened.
"""

import json
import os
import struct
import threading
import zlib
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from src.logger import Logger

EngineLines = List[Tuple[str, int]]


class EvalCache:
    """
    Map from evaluation keys to engine lines, optionally backed by a file.

    Reads are lock-free; writes are serialized.
    """

    HEADER = struct.Struct(">II")
    ENCODING = 'utf-8'

    def __init__(self, path: Optional[Path] = None, logger: Optional[Logger] = None):
        """
        Open (or create) the cache.

        Args:
            path: Cache file; None keeps the cache in memory only
            logger: Logger for recovery messages
        """
        self.path = Path(path) if path is not None else None
        self.logger = logger or Logger.silent()
        self._entries: Dict[str, Tuple[Tuple[str, int], ...]] = {}
        self._lock = threading.Lock()
        self._handle = None
        if self.path is not None:
            self._load()
            self._handle = open(self.path, 'ab')

    @staticmethod
    def make_key(
        engine_id: str,
        moves: Sequence[str],
        movetime_ms: int,
        multipv: int,
        root_moves: Optional[Sequence[str]] = None,
    ) -> str:
        """Key of one evaluation request."""
        position = " ".join(moves) or "startpos"
        restricted = ",".join(root_moves) if root_moves else "*"
        return f"{engine_id}|{position}|{movetime_ms}|{multipv}|{restricted}"

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, key: str) -> bool:
        return key in self._entries

    def get(self, key: str) -> Optional[EngineLines]:
        entry = self._entries.get(key)
        return None if entry is None else list(entry)

    def put(self, key: str, lines: Sequence[Tuple[str, int]]) -> None:
        """Store `lines` under `key`; an existing record is kept unchanged."""
        entry = tuple((str(move), int(cp)) for move, cp in lines)
        with self._lock:
            if key in self._entries:
                return
            self._entries[key] = entry
            if self._handle is not None:
                self._handle.write(self._encode(key, entry))
                self._handle.flush()

    def close(self) -> None:
        with self._lock:
            if self._handle is not None:
                self._handle.flush()
                os.fsync(self._handle.fileno())
                self._handle.close()
                self._handle = None

    def __enter__(self) -> "EvalCache":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def _encode(self, key: str, entry) -> bytes:
        payload = json.dumps(
            {"key": key, "lines": [list(line) for line in entry]},
            separators=(",", ":"),
        ).encode(self.ENCODING)
        return self.HEADER.pack(len(payload), zlib.crc32(payload)) + payload

    def _load(self) -> None:
        if not self.path.exists():
            self.path.parent.mkdir(parents=True, exist_ok=True)
            self.path.touch()
            return

        data = self.path.read_bytes()
        offset = 0
        while offset < len(data):
            record = self._decode(data, offset)
            if record is None:
                self.logger.warning(
                    f"Truncating corrupt cache tail at byte {offset} of {self.path}"
                )
                with open(self.path, 'r+b') as handle:
                    handle.truncate(offset)
                break
            key, entry, offset = record
            self._entries.setdefault(key, entry)
        self.logger.debug(f"Loaded {len(self._entries)} cached evaluations from {self.path}")

    def _decode(self, data: bytes, offset: int):
        end_of_header = offset + self.HEADER.size
        if end_of_header > len(data):
            return None
        length, checksum = self.HEADER.unpack_from(data, offset)
        payload = data[end_of_header:end_of_header + length]
        if len(payload) != length or zlib.crc32(payload) != checksum:
            return None
        try:
            record = json.loads(payload.decode(self.ENCODING))
            entry = tuple((str(move), int(cp)) for move, cp in record["lines"])
            return record["key"], entry, end_of_header + length
        except (ValueError, KeyError, TypeError):
            return None
