"""Acceptance suite: every exit criterion at its stated tolerance.

The end-to-end criteria share one scripted run of the full platform (four
mock endpoints behind the wire protocol, fifty completed battles driven
through the public HTTP surface) so the privacy sweep and blindness scan
inspect exactly what a real deployment would have produced.
"""

from __future__ import annotations

import asyncio
import json
import math
import random
import time
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import httpx
import numpy as np
import pytest
from scipy import stats

from tunearena.domain import canonical_dumps, record_from_dict, record_to_dict, validate_battle
from tunearena.domain.types import BattleRecord, ListenEvent, ListenEventKind, Preference
from tunearena.gateway import build_service_app
from tunearena.leaderboard import fit_strengths, rtf
from tunearena.privacy import SaltConfig, pseudonymize
from tunearena.store import export_release, verify_release

from factories import BASE_EPOCH
from harness import OffsetClock, build_platform
from oracles import grid_search_mle, has_finite_mle, random_outcome_matrix
from test_privacy import openssl_reference

# ---------------------------------------------------------------------------
# criterion: RTF fixed point
# ---------------------------------------------------------------------------


def test_rtf_fixed_point(reference_battle):
    assert rtf(30.0, 3.0) == 10.0  # exact
    m = reference_battle.b_metadata
    span = m.system_time_completed - m.system_time_started
    assert abs(rtf(m.duration, span) - 29.952 / 9.0999) < 1e-3


# ---------------------------------------------------------------------------
# criterion: reference record conformance (runtime < 1 s)
# ---------------------------------------------------------------------------

# independent-script oracle over the published listen timestamps:
# (1753572731.188438 - 1753572708.6986423) + (1753572789.6293015 - 1753572763.5559134)
LISTEN_ORACLE_A = 48.5631838


def test_reference_record_conformance(reference_battle_text):
    from tunearena.domain.listen import effective_listen_seconds

    started = time.monotonic()
    tree = json.loads(reference_battle_text)
    record = record_from_dict(tree)
    assert validate_battle(record) == []
    ours = record_to_dict(record)
    assert canonical_dumps(ours, sort_keys=True) == canonical_dumps(tree, sort_keys=True)
    listened = effective_listen_seconds(
        record.vote.a_listen_data, now=record.vote.preference_time
    )
    assert abs(listened - LISTEN_ORACLE_A) < 1e-6
    assert time.monotonic() - started < 1.0


# ---------------------------------------------------------------------------
# criterion: BT oracle equivalence (runtime < 30 s)
# ---------------------------------------------------------------------------


def test_bt_oracle_equivalence():
    started = time.monotonic()
    rng = np.random.default_rng(20260810)
    checked = 0
    draws = 0
    while checked < 50:
        draws += 1
        assert draws < 2000, "random matrix generation starved"
        wins, ties = random_outcome_matrix(rng, max_systems=4, max_battles=20)
        wins_eff = wins + 0.5 * ties
        if not has_finite_mle(wins_eff):
            continue  # the MLE is only finite on strongly connected outcomes
        ours = fit_strengths(wins_eff)
        oracle = grid_search_mle(wins_eff)
        assert np.max(np.abs(ours - oracle)) < 1e-3, (
            f"matrix {checked}: fit {ours} vs oracle {oracle}"
        )
        checked += 1

    # two players, 8-2: the strength gap is the log odds, exactly ln 4
    wins_eff = np.array([[0.0, 8.0], [2.0, 0.0]])
    beta = fit_strengths(wins_eff)
    assert abs((beta[0] - beta[1]) - math.log(4.0)) < 1e-6
    assert time.monotonic() - started < 30.0


# ---------------------------------------------------------------------------
# criterion: ranking recovery (runtime < 2 min)
# ---------------------------------------------------------------------------


def test_ranking_recovery():
    started = time.monotonic()
    true_beta = np.array([1.0, 0.5, 0.0, -0.5, -1.0])  # gaps exactly 0.5
    pairs = [(i, j) for i in range(5) for j in range(i + 1, 5)]
    recovered = 0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        wins = np.zeros((5, 5))
        chosen = rng.integers(0, len(pairs), 2000)
        noise = rng.random(2000)
        for k, u in zip(chosen, noise):
            i, j = pairs[k]
            p = 1.0 / (1.0 + math.exp(-(true_beta[i] - true_beta[j])))
            if u < p:
                wins[i, j] += 1
            else:
                wins[j, i] += 1
        beta = fit_strengths(wins)
        if np.array_equal(np.argsort(-beta), np.argsort(-true_beta)):
            recovered += 1
    assert recovered >= 99, f"recovered true ranking in only {recovered}/100 runs"
    assert time.monotonic() - started < 120.0


# ---------------------------------------------------------------------------
# criterion: pair-sampling uniformity (1e5 draws, k=5)
# ---------------------------------------------------------------------------


def test_pair_sampling_uniformity():
    from tunearena.endpoints import build_mock_system
    from tunearena.gateway import UniformPairSampler

    descriptors = [build_mock_system("tone", f"sys-{i}").descriptor for i in range(5)]
    sampler = UniformPairSampler()
    rng = random.Random(318008)
    pair_counts: Counter = Counter()
    cell_counts: Counter = Counter()
    for _ in range(100_000):
        a, b = sampler.sample(descriptors, rng)
        pair = tuple(sorted((a.key.system_tag, b.key.system_tag)))
        pair_counts[pair] += 1
        cell_counts[(pair, a.key.system_tag == pair[0])] += 1
    assert len(pair_counts) == 10
    assert stats.chisquare(list(pair_counts.values())).pvalue > 0.01
    assert len(cell_counts) == 20
    assert stats.chisquare(list(cell_counts.values())).pvalue > 0.01


# ---------------------------------------------------------------------------
# shared end-to-end run over the public HTTP surface
# ---------------------------------------------------------------------------

RAW_IPS = [f"203.0.113.{i}" for i in range(2, 12)]
RAW_FINGERPRINTS = ["fp-alpha-7731", "fp-beta-9120", "fp-gamma-5518"]

PROMPTS = [
    "folk song about a cat named biscuit",
    "ambient texture, no vocals",
    "sea shanty with rowdy vocals",
    "a 20 second ambient sting, no vocals",
    "lo-fi beat for studying, instrumental",
    "celtic reel with fiddle, wordless",
    "synthwave chase scene, instrumental",
    "ballad to sing at closing time",
]


@dataclass
class E2ERun:
    store_root: Path
    release_a: Path
    release_b: Path
    reveal_bodies: list[dict]
    prevote_responses: list[tuple[str, str]]  # (path, body text)
    records: list[BattleRecord]
    receipt_latencies: list[tuple[float, float, float]]  # receipt vs per-side completion
    leaderboard: dict
    salt: SaltConfig
    elapsed: float
    gate_probes: list[dict] = field(default_factory=list)


async def _drive(tmp_path) -> E2ERun:
    started = time.monotonic()
    clock = OffsetClock(BASE_EPOCH)
    platform = await build_platform(tmp_path, clock=clock, seed=20260810)
    app = build_service_app(platform.gateway)
    client = httpx.AsyncClient(transport=httpx.ASGITransport(app=app), base_url="http://svc")
    platform.clients.append(client)

    prevote: list[tuple[str, str]] = []
    reveals: list[dict] = []
    receipts: list[tuple[float, float, float]] = []
    script = random.Random(77)

    async def get(path, **kwargs):
        response = await client.get(path, **kwargs)
        return response

    consent = await get("/consent")
    prevote.append(("/consent", consent.text))
    digest = consent.json()["digest"]

    sessions = []
    for i in range(5):
        response = await client.post(
            "/sessions", json={"ack_tos": digest, "frontend_version": "e2e/1.0"}
        )
        prevote.append(("/sessions", response.text))
        sessions.append(response.json()["session_uuid"])

    completed = 0
    battle_index = 0
    while completed < 50:
        session_uuid = sessions[battle_index % len(sessions)]
        prompt = PROMPTS[battle_index % len(PROMPTS)]
        headers = {"x-forwarded-for": RAW_IPS[battle_index % len(RAW_IPS)]}
        if battle_index % 3 == 0:
            headers["x-client-fingerprint"] = RAW_FINGERPRINTS[
                battle_index % len(RAW_FINGERPRINTS)
            ]
        battle_index += 1
        response = await client.post(
            "/battles",
            json={"session_uuid": session_uuid, "prompt": prompt},
            headers=headers,
        )
        receipt_time = platform.clock()
        assert response.status_code == 200, response.text
        prevote.append(("/battles", response.text))
        blind = response.json()
        assert set(blind) == {"battle_uuid", "a_audio_url", "b_audio_url"}
        battle_uuid = blind["battle_uuid"]

        record = platform.store.get(battle_uuid)
        receipts.append(
            (
                receipt_time,
                record.a_metadata.gateway_time_completed,
                record.b_metadata.gateway_time_completed,
            )
        )

        for side in ("a", "b"):
            audio = await get(blind[f"{side}_audio_url"])
            assert audio.status_code == 200
            assert audio.content[:4] == b"RIFF"

        gate_before = await get(f"/battles/{battle_uuid}/gate")
        prevote.append((f"/battles/{battle_uuid}/gate", gate_before.text))
        assert gate_before.json()["open"] is False

        end = platform.clock()
        for side in ("A", "B"):
            events = [
                ["PLAY", end - 5.5],
                ["TICK", end - 4.5],
                ["TICK", end - 3.5],
                ["PAUSE", end - 0.25],
            ]
            listen = await client.post(
                f"/battles/{battle_uuid}/listen", json={"side": side, "events": events}
            )
            assert listen.status_code == 200, listen.text
            prevote.append((f"/battles/{battle_uuid}/listen", listen.text))

        gate_after = await get(f"/battles/{battle_uuid}/gate")
        prevote.append((f"/battles/{battle_uuid}/gate", gate_after.text))
        assert gate_after.json()["open"] is True

        preference = script.choices(
            ["A", "B", "TIE", "BOTH_BAD"], weights=[0.35, 0.35, 0.15, 0.15]
        )[0]
        reveal = await client.post(
            f"/battles/{battle_uuid}/vote",
            json={"session_uuid": session_uuid, "preference": preference},
        )
        assert reveal.status_code == 200, reveal.text
        reveals.append(reveal.json())
        if script.random() < 0.3:
            feedback = await client.post(
                f"/battles/{battle_uuid}/feedback",
                json={"feedback": f"scripted feedback {completed}"},
            )
            assert feedback.status_code == 200
        completed += 1

    # a few delivered-but-abandoned battles exercise the incomplete shard
    for i in range(3):
        response = await client.post(
            "/battles",
            json={"session_uuid": sessions[0], "prompt": "ambient texture, no vocals"},
            headers={"x-forwarded-for": RAW_IPS[0]},
        )
        assert response.status_code == 200
        prevote.append(("/battles", response.text))

    board = await get("/leaderboard")
    assert board.status_code == 200

    export_now = BASE_EPOCH + 40 * 86400.0  # well into the following month
    from tunearena.compose import load_descriptor_snapshot, save_descriptor_snapshot

    save_descriptor_snapshot(platform.store.root, platform.registry.descriptors())
    descriptors = load_descriptor_snapshot(platform.store.root)
    _, release_a = export_release(
        platform.store, descriptors, "2026-07", tmp_path / "release-a",
        salt_version=platform.salt.version, now=lambda: export_now,
    )
    _, release_b = export_release(
        platform.store, descriptors, "2026-07", tmp_path / "release-b",
        salt_version=platform.salt.version, now=lambda: export_now,
    )

    records = [
        r
        for r in platform.store.latest_records().values()
        if isinstance(r, BattleRecord)
    ]
    run = E2ERun(
        store_root=platform.store.root,
        release_a=release_a,
        release_b=release_b,
        reveal_bodies=reveals,
        prevote_responses=prevote,
        records=records,
        receipt_latencies=receipts,
        leaderboard=board.json(),
        salt=platform.salt,
        elapsed=time.monotonic() - started,
    )
    await platform.aclose()
    return run


@pytest.fixture(scope="session")
def e2e_run(tmp_path_factory) -> E2ERun:
    return asyncio.run(_drive(tmp_path_factory.mktemp("e2e")))


# ---------------------------------------------------------------------------
# criterion: end-to-end lifecycle (runtime < 3 min, loopback only)
# ---------------------------------------------------------------------------


def test_end_to_end_lifecycle(e2e_run):
    assert e2e_run.elapsed < 180.0

    voted = [r for r in e2e_run.records if r.vote is not None]
    assert len(voted) == 50

    # correct timing-label order on every completed battle
    for record in voted:
        assert validate_battle(record) == [], record.uuid

    # retry accounting: flaky always drops the first attempt
    flaky_sides = [
        m
        for r in e2e_run.records
        for m in (r.a_metadata, r.b_metadata)
        if m.system_key.system_tag == "flaky"
    ]
    assert flaky_sides, "flaky endpoint never sampled"
    assert all(m.gateway_num_retries == 1 for m in flaky_sides)
    other_sides = [
        m
        for r in e2e_run.records
        for m in (r.a_metadata, r.b_metadata)
        if m.system_key.system_tag != "flaky"
    ]
    assert all(m.gateway_num_retries == 0 for m in other_sides)

    # simultaneous delivery: no audio reference reached the client before
    # both generation spans closed
    for receipt, a_done, b_done in e2e_run.receipt_latencies:
        assert receipt >= a_done - 1e-6
        assert receipt >= b_done - 1e-6

    # gateway span covers system span on every side
    for record in e2e_run.records:
        for m in (record.a_metadata, record.b_metadata):
            assert m.gateway_span >= m.system_span - 1e-6

    # every system appeared and the leaderboard carries sane intervals
    entries = e2e_run.leaderboard["entries"]
    assert {row["system"] for row in entries} == {
        "tone:default", "noise:default", "slow:default", "flaky:default"
    }
    for row in entries:
        assert row["ci_low"] <= row["arena_score"] <= row["ci_high"]
        assert row["votes"] > 0


# ---------------------------------------------------------------------------
# criterion: vote gate boundaries
# ---------------------------------------------------------------------------


@pytest.mark.parametrize(
    "a_seconds,b_seconds,expected_open",
    [(3.99, 3.99, False), (4.00, 4.00, True), (4.01, 4.01, True), (3.99, 60.0, False)],
)
def test_vote_gate_boundary(tmp_path, a_seconds, b_seconds, expected_open):
    async def main():
        platform = await build_platform(tmp_path)
        gateway = platform.gateway
        _, digest = gateway.consent()
        session = gateway.create_session(digest)
        from tunearena.domain.types import UserIdentity
        from tunearena.privacy import scrub_identity
        from harness import TEST_SALT

        identity = scrub_identity(UserIdentity(ip="203.0.113.99"), TEST_SALT)
        blind = await gateway.create_battle(
            session.uuid, "steady drone, no vocals", identity
        )
        base = float(math.floor(platform.clock())) + 50.0  # integer-exact boundary
        for side, seconds in (("A", a_seconds), ("B", b_seconds)):
            await gateway.submit_listen_events(
                blind.battle_uuid,
                side,
                [
                    ListenEvent(ListenEventKind.PLAY, base),
                    ListenEvent(ListenEventKind.PAUSE, base + seconds),
                ],
            )
        status = gateway.gate_status(blind.battle_uuid)
        assert status.open is expected_open
        if not expected_open:
            from tunearena.errors import VoteGateNotMetError

            with pytest.raises(VoteGateNotMetError) as info:
                await gateway.submit_vote(
                    blind.battle_uuid, session.uuid, Preference.A, identity
                )
            payload = info.value.payload()
            assert payload["code"] == "gate_not_met"
            assert payload["a_remaining_seconds"] >= 0.0
            assert payload["b_remaining_seconds"] >= 0.0
            assert (
                max(payload["a_remaining_seconds"], payload["b_remaining_seconds"]) > 0.0
            )
        else:
            reveal = await gateway.submit_vote(
                blind.battle_uuid, session.uuid, Preference.A, identity
            )
            assert reveal.download_url is not None
        await platform.aclose()

    asyncio.run(main())


# ---------------------------------------------------------------------------
# criterion: privacy sweep
# ---------------------------------------------------------------------------


def _scan_tree_for(root: Path, needles: list[bytes]) -> list[str]:
    hits = []
    for path in sorted(root.rglob("*")):
        if not path.is_file():
            continue
        blob = path.read_bytes()
        for needle in needles:
            if needle in blob:
                hits.append(f"{path}: {needle!r}")
    return hits


def test_privacy_sweep(e2e_run):
    needles = [ip.encode() for ip in RAW_IPS]
    needles += [fp.encode() for fp in RAW_FINGERPRINTS]
    needles += [e2e_run.salt.salt, e2e_run.salt.salt.hex().encode()]
    for tree in (e2e_run.store_root, e2e_run.release_a):
        hits = _scan_tree_for(tree, needles)
        assert hits == [], hits

    # salted identifiers are present (linkage works), raw ones are not
    shard_text = "".join(
        p.read_text() for p in (e2e_run.store_root / "battles").glob("*.jsonl")
    )
    assert pseudonymize(RAW_IPS[0], e2e_run.salt) in shard_text

    # pseudonymize agrees with an independent implementation of the hash
    rng = random.Random(991)
    for _ in range(1000):
        raw = bytes(rng.randrange(1, 256) for _ in range(rng.randrange(1, 40)))
        assert pseudonymize(raw, e2e_run.salt) == openssl_reference(e2e_run.salt.salt, raw)

    # re-exports are byte-identical
    def tree_map(root: Path) -> dict[str, bytes]:
        return {
            str(p.relative_to(root)): p.read_bytes()
            for p in sorted(root.rglob("*"))
            if p.is_file()
        }

    assert tree_map(e2e_run.release_a) == tree_map(e2e_run.release_b)

    # and the released tree passes independent verification
    report = verify_release(e2e_run.release_a)
    assert report.ok, report.problems
    assert report.record_count == 50
    assert report.incomplete_count == 3


# ---------------------------------------------------------------------------
# criterion: blindness scan
# ---------------------------------------------------------------------------


def _numeric_leaves(tree) -> list[float]:
    out = []
    if isinstance(tree, dict):
        for v in tree.values():
            out.extend(_numeric_leaves(v))
    elif isinstance(tree, list):
        for v in tree:
            out.extend(_numeric_leaves(v))
    elif isinstance(tree, bool):
        pass
    elif isinstance(tree, (int, float)):
        out.append(float(tree))
    return out


def test_blindness_scan(e2e_run):
    tags = ["tone", "noise", "slow", "flaky"]
    providers = ["tunearena mocks"]
    display_names = ["Tone", "Noise", "Slow", "Flaky"]
    durations = sorted(
        {
            m.duration
            for r in e2e_run.records
            for m in (r.a_metadata, r.b_metadata)
        }
    )
    for path, body in e2e_run.prevote_responses:
        lowered = body.lower()
        for needle in tags + [p.lower() for p in providers] + [
            d.lower() for d in display_names
        ]:
            assert needle not in lowered, f"{path} leaks {needle!r}: {body[:120]}"
        for leaf in _numeric_leaves(json.loads(body)):
            for duration in durations:
                assert abs(leaf - duration) > 1e-9, (
                    f"{path} leaks a track duration {duration}: {body[:120]}"
                )

    # the reveal, by contrast, names both systems and their speeds
    for reveal in e2e_run.reveal_bodies:
        assert reveal["a"]["system"]["system_tag"] in tags
        assert reveal["b"]["system"]["system_tag"] in tags
        assert reveal["a"]["rtf"] > 0
        if reveal["preference"] in ("A", "B"):
            assert reveal["download_url"]
        else:
            assert reveal["download_url"] is None
