"""Rolling data releases: one scrubbed, comprehensive tree per closed month.

Release layout:

    <out>/<YYYY-MM>/battles-00000.jsonl      voted battles, by vote time
    <out>/<YYYY-MM>/incomplete-00000.jsonl   unvoted and failed battles
    <out>/<YYYY-MM>/audio/<checksum>.wav     payloads, where licenses allow
    <out>/<YYYY-MM>/manifest.json            counts, digests, exclusions

Exports are deterministic: re-exporting the same store state is byte
identical, which lets anyone verify a published release against the log.
"""

from __future__ import annotations

import json
import re
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Iterable, Mapping, Optional

from tunearena.domain.serialize import battle_to_dict, canonical_dumps
from tunearena.domain.types import BattleRecord, FailedBattle, SystemKey
from tunearena.domain.validate import validate_battle
from tunearena.endpoints.descriptor import SystemDescriptor
from tunearena.hashing import digest128_hex
from tunearena.store.battles import BattleStore

SCHEMA_VERSION = 1
_PERIOD_RE = re.compile(r"^\d{4}-(0[1-9]|1[0-2])$")


@dataclass(frozen=True)
class AudioExclusion:
    system_key: SystemKey
    reason: str


@dataclass(frozen=True)
class ReleaseManifest:
    schema_version: int
    period: str
    record_count: int
    incomplete_count: int
    salt_version: str
    excluded_audio: tuple[AudioExclusion, ...]
    files: dict[str, str]

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "period": self.period,
            "record_count": self.record_count,
            "incomplete_count": self.incomplete_count,
            "salt_version": self.salt_version,
            "excluded_audio": [
                {
                    "system_key": {
                        "system_tag": e.system_key.system_tag,
                        "variant_tag": e.system_key.variant_tag,
                    },
                    "reason": e.reason,
                }
                for e in self.excluded_audio
            ],
            "files": dict(sorted(self.files.items())),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ReleaseManifest":
        return cls(
            schema_version=int(d["schema_version"]),
            period=str(d["period"]),
            record_count=int(d["record_count"]),
            incomplete_count=int(d["incomplete_count"]),
            salt_version=str(d["salt_version"]),
            excluded_audio=tuple(
                AudioExclusion(
                    system_key=SystemKey(
                        system_tag=e["system_key"]["system_tag"],
                        variant_tag=e["system_key"]["variant_tag"],
                    ),
                    reason=str(e["reason"]),
                )
                for e in d["excluded_audio"]
            ),
            files=dict(d["files"]),
        )


def month_of(epoch_seconds: float) -> str:
    return datetime.fromtimestamp(epoch_seconds, tz=timezone.utc).strftime("%Y-%m")


def creation_time(record: BattleRecord | FailedBattle) -> float:
    if record.timings:
        return record.timings[0][1]
    return record.prompt_session.create_time


def _descriptor_map(
    descriptors: Iterable[SystemDescriptor],
) -> Mapping[SystemKey, SystemDescriptor]:
    return {d.key: d for d in descriptors}


def _partition(store: BattleStore, period: str):
    voted, incomplete = [], []
    for record in store.latest_records().values():
        if isinstance(record, BattleRecord) and record.vote is not None:
            if month_of(record.vote.preference_time) == period:
                voted.append(record)
        else:
            if month_of(creation_time(record)) == period:
                incomplete.append(record)
    voted.sort(key=lambda r: (r.vote.preference_time, r.uuid))
    incomplete.sort(key=lambda r: (creation_time(r), r.uuid))
    return voted, incomplete


def _write_shards(
    records: list, out_dir: Path, stem: str, shard_size: int
) -> list[Path]:
    paths = []
    for start in range(0, len(records), shard_size):
        shard = records[start : start + shard_size]
        path = out_dir / f"{stem}-{start // shard_size:05d}.jsonl"
        with path.open("w", encoding="utf-8") as f:
            for record in shard:
                f.write(canonical_dumps(battle_to_dict(record)) + "\n")
        paths.append(path)
    return paths


def export_release(
    store: BattleStore,
    descriptors: Iterable[SystemDescriptor],
    period: str,
    out_root: str | Path,
    *,
    salt_version: str,
    shard_size: int = 1000,
    now: Callable[[], float] = time.time,
) -> tuple[ReleaseManifest, Path]:
    """Emit the release tree for a closed calendar month."""
    if not _PERIOD_RE.match(period):
        raise ValueError(f"period must be YYYY-MM, got {period!r}")
    if period >= month_of(now()):
        raise ValueError(f"period {period} is not closed yet; exports cover past months only")

    by_key = _descriptor_map(descriptors)
    voted, incomplete = _partition(store, period)

    out_dir = Path(out_root) / period
    out_dir.mkdir(parents=True, exist_ok=True)
    audio_dir = out_dir / "audio"
    audio_dir.mkdir(exist_ok=True)

    exclusions: dict[SystemKey, AudioExclusion] = {}

    def releasable(key: SystemKey) -> bool:
        desc = by_key.get(key)
        if desc is None:
            exclusions.setdefault(
                key,
                AudioExclusion(key, "system not in registry; releasability unknown"),
            )
            return False
        if not desc.audio_releasable:
            exclusions.setdefault(
                key, AudioExclusion(key, "license prevents release of generated audio")
            )
            return False
        return True

    checksums: set[str] = set()
    for record in voted + [r for r in incomplete if isinstance(r, BattleRecord)]:
        for metadata in (record.a_metadata, record.b_metadata):
            if releasable(metadata.system_key):
                checksums.add(metadata.checksum)

    for checksum in sorted(checksums):
        if not store.has_audio(checksum):
            raise FileNotFoundError(f"store is missing audio payload {checksum}")
        (audio_dir / f"{checksum}.wav").write_bytes(store.get_audio(checksum))

    files: dict[str, str] = {}
    for path in _write_shards(voted, out_dir, "battles", shard_size):
        files[path.name] = digest128_hex(path.read_bytes())
    for path in _write_shards(incomplete, out_dir, "incomplete", shard_size):
        files[path.name] = digest128_hex(path.read_bytes())
    for checksum in sorted(checksums):
        rel = f"audio/{checksum}.wav"
        files[rel] = digest128_hex((out_dir / rel).read_bytes())

    manifest = ReleaseManifest(
        schema_version=SCHEMA_VERSION,
        period=period,
        record_count=len(voted),
        incomplete_count=len(incomplete),
        salt_version=salt_version,
        excluded_audio=tuple(
            sorted(exclusions.values(), key=lambda e: e.system_key.label())
        ),
        files=files,
    )
    (out_dir / "manifest.json").write_text(
        canonical_dumps(manifest.to_dict(), sort_keys=True, indent=2) + "\n",
        encoding="utf-8",
    )
    return manifest, out_dir


@dataclass
class VerifyReport:
    ok: bool
    problems: list[str]
    record_count: int = 0
    incomplete_count: int = 0


def verify_release(
    release_dir: str | Path,
    store: Optional[BattleStore] = None,
) -> VerifyReport:
    """Re-check digests, scrub-cleanliness, and (given a store) completeness."""
    release_dir = Path(release_dir)
    problems: list[str] = []
    manifest_path = release_dir / "manifest.json"
    if not manifest_path.exists():
        return VerifyReport(ok=False, problems=["manifest.json missing"])
    manifest = ReleaseManifest.from_dict(json.loads(manifest_path.read_text()))

    present = {
        str(p.relative_to(release_dir)).replace("\\", "/")
        for p in release_dir.rglob("*")
        if p.is_file() and p.name != "manifest.json"
    }
    for rel, digest in manifest.files.items():
        path = release_dir / rel
        if not path.exists():
            problems.append(f"listed file missing: {rel}")
            continue
        actual = digest128_hex(path.read_bytes())
        if actual != digest:
            problems.append(f"digest mismatch for {rel}: {actual} != {digest}")
    unexpected = present - set(manifest.files)
    for rel in sorted(unexpected):
        problems.append(f"file not in manifest: {rel}")

    released_voted: set[str] = set()
    released_incomplete: set[str] = set()
    for rel in sorted(manifest.files):
        if not rel.endswith(".jsonl"):
            continue
        path = release_dir / rel
        if not path.exists():
            continue
        for i, line in enumerate(path.read_text(encoding="utf-8").splitlines()):
            doc = json.loads(line)
            for who in ("prompt_user", "vote_user"):
                identity = doc.get(who)
                if identity and (
                    identity.get("ip") is not None or identity.get("fingerprint") is not None
                ):
                    problems.append(f"{rel}:{i + 1} {who} leaks a raw identifier")
            if "failure" not in doc and rel.startswith("battles-"):
                from tunearena.domain.serialize import record_from_dict

                violations = validate_battle(record_from_dict(doc))
                for v in violations:
                    problems.append(f"{rel}:{i + 1} invalid record: {v}")
            (released_voted if rel.startswith("battles-") else released_incomplete).add(
                doc["uuid"]
            )

    if len(released_voted) != manifest.record_count:
        problems.append(
            f"manifest record_count {manifest.record_count} != "
            f"{len(released_voted)} released"
        )

    if store is not None:
        expected_voted, expected_incomplete = _partition(store, manifest.period)
        expected_voted_ids = {r.uuid for r in expected_voted}
        expected_incomplete_ids = {r.uuid for r in expected_incomplete}
        if expected_voted_ids != released_voted:
            problems.append(
                f"voted battles differ from store: missing={sorted(expected_voted_ids - released_voted)}, "
                f"extra={sorted(released_voted - expected_voted_ids)}"
            )
        if expected_incomplete_ids != released_incomplete:
            problems.append("incomplete battles differ from store")

    return VerifyReport(
        ok=not problems,
        problems=problems,
        record_count=manifest.record_count,
        incomplete_count=manifest.incomplete_count,
    )
