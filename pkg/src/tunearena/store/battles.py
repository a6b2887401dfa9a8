"""Append-only battle record log plus content-addressed audio blobs.

Layout under the store root:

    battles/<YYYY-MM-DD>.jsonl   one canonical record snapshot per line
    audio/<checksum>.wav         content-addressed payloads

Nothing is ever mutated or deleted. A battle that acquires a vote (and later
feedback) is re-appended as a full snapshot; readers take the last snapshot
per uuid as current. This keeps the log trivially auditable: replaying it
reproduces every intermediate state the platform ever persisted.

Crash consistency: audio payloads are written and fsynced before the record
line referencing them, so a record is never visible without its audio.
"""

from __future__ import annotations

import os
import threading
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Iterator, Optional

from tunearena.domain.serialize import battle_from_dict, battle_to_dict, canonical_dumps
from tunearena.domain.types import BattleRecord, DomainLimits, FailedBattle
from tunearena.domain.validate import validate_battle
from tunearena.errors import InvalidRecordError, StorageConflictError
from tunearena.hashing import digest128_hex


@dataclass(frozen=True)
class StoredPosition:
    shard: str
    line: int


def _identity_violations(record: BattleRecord | FailedBattle) -> list[str]:
    problems = []
    if record.prompt_user.ip is not None or record.prompt_user.fingerprint is not None:
        problems.append("prompt_user carries a raw identifier")
    vote_user = getattr(record, "vote_user", None)
    if vote_user is not None and (vote_user.ip is not None or vote_user.fingerprint is not None):
        problems.append("vote_user carries a raw identifier")
    return problems


class BattleStore:
    def __init__(
        self,
        root: str | Path,
        *,
        limits: DomainLimits = DomainLimits(),
        clock: Callable[[], float] = time.time,
        fsync: bool = True,
    ):
        self.root = Path(root)
        self.limits = limits
        self.clock = clock
        self.fsync = fsync
        self.battles_dir = self.root / "battles"
        self.audio_dir = self.root / "audio"
        self.battles_dir.mkdir(parents=True, exist_ok=True)
        self.audio_dir.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self._order: list[tuple[str, StoredPosition]] = []  # (uuid, position) per line
        self._latest: dict[str, dict] = {}
        self._shard_lines: dict[str, int] = {}
        self._load()

    # -- record log ----------------------------------------------------------

    def _shards(self) -> list[Path]:
        return sorted(self.battles_dir.glob("*.jsonl"))

    def _load(self) -> None:
        import json

        for shard in self._shards():
            with shard.open("r", encoding="utf-8") as f:
                for i, line in enumerate(f):
                    line = line.strip()
                    if not line:
                        continue
                    doc = json.loads(line)
                    uuid = doc["uuid"]
                    self._order.append((uuid, StoredPosition(shard.name, i)))
                    self._latest[uuid] = doc
                    self._shard_lines[shard.name] = i + 1

    def _append_line(self, doc: dict) -> StoredPosition:
        day = datetime.fromtimestamp(self.clock(), tz=timezone.utc).strftime("%Y-%m-%d")
        shard = self.battles_dir / f"{day}.jsonl"
        with self._lock:
            with shard.open("a", encoding="utf-8") as f:
                f.write(canonical_dumps(doc) + "\n")
                f.flush()
                if self.fsync:
                    os.fsync(f.fileno())
            line = self._shard_lines.get(shard.name, 0)
            self._shard_lines[shard.name] = line + 1
            position = StoredPosition(shard.name, line)
            self._order.append((doc["uuid"], position))
            self._latest[doc["uuid"]] = doc
        return position

    def _checked_doc(self, record: BattleRecord | FailedBattle) -> dict:
        problems = _identity_violations(record)
        if problems:
            raise InvalidRecordError(problems)
        if isinstance(record, BattleRecord):
            violations = validate_battle(record, self.limits)
            if violations:
                raise InvalidRecordError(violations)
            for url in (record.a_audio_url, record.b_audio_url):
                if url.startswith("audio/") and not (self.root / url).exists():
                    raise InvalidRecordError([f"referenced payload missing: {url}"])
        return battle_to_dict(record)

    def append_battle(self, record: BattleRecord | FailedBattle) -> StoredPosition:
        """Persist the first snapshot of a battle; duplicate uuids conflict."""
        doc = self._checked_doc(record)
        if record.uuid in self._latest:
            raise StorageConflictError(f"battle {record.uuid} already stored")
        return self._append_line(doc)

    def append_revision(self, record: BattleRecord) -> StoredPosition:
        """Persist an updated snapshot (vote, feedback) of a stored battle."""
        doc = self._checked_doc(record)
        if record.uuid not in self._latest:
            raise StorageConflictError(f"battle {record.uuid} has no initial snapshot")
        return self._append_line(doc)

    def get(self, uuid: str) -> Optional[BattleRecord | FailedBattle]:
        doc = self._latest.get(uuid)
        return battle_from_dict(doc) if doc is not None else None

    def iter_snapshots(self) -> Iterator[BattleRecord | FailedBattle]:
        """Every stored snapshot, in append order (revisions included)."""
        import json

        for shard in self._shards():
            with shard.open("r", encoding="utf-8") as f:
                for line in f:
                    line = line.strip()
                    if line:
                        yield battle_from_dict(json.loads(line))

    def latest_records(self) -> dict[str, BattleRecord | FailedBattle]:
        return {uuid: battle_from_dict(doc) for uuid, doc in self._latest.items()}

    def __len__(self) -> int:
        return len(self._latest)

    # -- audio blobs ---------------------------------------------------------

    def put_audio(self, payload: bytes) -> str:
        """Store a payload content-addressed; returns its checksum."""
        checksum = digest128_hex(payload)
        path = self.audio_dir / f"{checksum}.wav"
        if path.exists():
            return checksum  # identical content already stored once
        tmp = path.with_suffix(".tmp")
        with tmp.open("wb") as f:
            f.write(payload)
            f.flush()
            if self.fsync:
                os.fsync(f.fileno())
        tmp.rename(path)
        return checksum

    def audio_url_for(self, checksum: str) -> str:
        return f"audio/{checksum}.wav"

    def has_audio(self, checksum: str) -> bool:
        return (self.audio_dir / f"{checksum}.wav").exists()

    def get_audio(self, checksum: str) -> bytes:
        return (self.audio_dir / f"{checksum}.wav").read_bytes()
