from __future__ import annotations

import dataclasses

import httpx

from tunearena.domain.types import UserIdentity
from tunearena.errors import GateUnavailableError
from tunearena.gateway import build_service_app
from tunearena.privacy import scrub_identity
from tunearena.store import BattleStore, export_release

from factories import BASE_EPOCH, make_record
from harness import TEST_SALT, build_platform, consent_and_session, run

JUNE = BASE_EPOCH - 25 * 86400.0


def identity():
    return scrub_identity(UserIdentity(ip="203.0.113.61"), TEST_SALT)


def test_custom_pair_sampler_plugs_in(tmp_path):
    """The sampler is a documented extension point; a biased one drops in."""

    class FirstTwoSampler:
        def sample(self, compatible, rng):
            ordered = sorted(compatible, key=lambda d: d.key.label())
            return ordered[0], ordered[1]

    async def main():
        platform = await build_platform(tmp_path)
        platform.gateway.sampler = FirstTwoSampler()
        session = await consent_and_session(platform.gateway)
        blind = await platform.gateway.create_battle(
            session.uuid, "pattern study, no vocals", identity()
        )
        record = platform.store.get(blind.battle_uuid)
        pair = {record.a_metadata.system_key.system_tag, record.b_metadata.system_key.system_tag}
        assert pair == {"flaky", "noise"}  # first two by label
        await platform.aclose()

    run(main())


def test_gate_unavailable_maps_to_retryable_503(tmp_path):
    class DownAnalyzer:
        config_digest = "0" * 32

        async def analyze(self, prompt):
            raise GateUnavailableError("analysis backend unreachable")

        async def write_lyrics(self, prompt):
            raise GateUnavailableError("analysis backend unreachable")

    async def main():
        platform = await build_platform(tmp_path)
        platform.gateway.analyzer = DownAnalyzer()
        app = build_service_app(platform.gateway)
        client = httpx.AsyncClient(
            transport=httpx.ASGITransport(app=app), base_url="http://svc"
        )
        platform.clients.append(client)
        consent = (await client.get("/consent")).json()
        session = await client.post("/sessions", json={"ack_tos": consent["digest"]})
        response = await client.post(
            "/battles",
            json={
                "session_uuid": session.json()["session_uuid"],
                "prompt": "anything at all",
            },
        )
        await platform.aclose()
        return response

    response = run(main())
    assert response.status_code == 503
    body = response.json()
    assert body["code"] == "gate_unavailable"
    assert body["retryable"] is True


def seeded_store(root, n):
    store = BattleStore(root, clock=lambda: BASE_EPOCH, fsync=False)
    for i in range(n):
        record = make_record(t0=JUNE + i * 3600.0)
        a = store.put_audio(b"RIFF-a" + record.uuid.encode())
        b = store.put_audio(b"RIFF-b" + record.uuid.encode())
        record = dataclasses.replace(
            record,
            a_audio_url=store.audio_url_for(a),
            b_audio_url=store.audio_url_for(b),
            a_metadata=dataclasses.replace(record.a_metadata, checksum=a),
            b_metadata=dataclasses.replace(record.b_metadata, checksum=b),
        )
        store.append_battle(record)
    return store


def tree_bytes(root):
    return {
        str(p.relative_to(root)): p.read_bytes()
        for p in sorted(root.rglob("*"))
        if p.is_file()
    }


def test_export_identical_after_store_restart(tmp_path):
    from tunearena.endpoints import build_mock_system

    descriptors = [
        build_mock_system("tone", "sys-a").descriptor,
        build_mock_system("noise", "sys-b").descriptor,
    ]
    store = seeded_store(tmp_path / "store", 5)
    _, live = export_release(
        store, descriptors, "2026-06", tmp_path / "live", salt_version="v1"
    )
    reopened = BattleStore(tmp_path / "store", clock=lambda: BASE_EPOCH, fsync=False)
    _, cold = export_release(
        reopened, descriptors, "2026-06", tmp_path / "cold", salt_version="v1"
    )
    assert tree_bytes(live) == tree_bytes(cold)


def test_export_shards_roll_over(tmp_path):
    from tunearena.endpoints import build_mock_system

    descriptors = [
        build_mock_system("tone", "sys-a").descriptor,
        build_mock_system("noise", "sys-b").descriptor,
    ]
    store = seeded_store(tmp_path / "store", 7)
    manifest, out = export_release(
        store, descriptors, "2026-06", tmp_path / "release",
        salt_version="v1", shard_size=3,
    )
    shards = sorted(p.name for p in out.glob("battles-*.jsonl"))
    assert shards == ["battles-00000.jsonl", "battles-00001.jsonl", "battles-00002.jsonl"]
    total = sum(
        len((out / name).read_text().splitlines()) for name in shards
    )
    assert total == manifest.record_count == 7
    from tunearena.store import verify_release

    assert verify_release(out, store).ok
