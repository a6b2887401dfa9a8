from __future__ import annotations

import asyncio

import pytest

from tunearena.compose import build_gateway, load_descriptor_snapshot
from tunearena.domain.types import UserIdentity
from tunearena.privacy import scrub_identity

CONFIG = """\
store: {store}
gateway:
  listen_gate_seconds: 4.0
  rate_limit_per_minute: 0
  bootstrap_resamples: 100
analyzer:
  kind: rules
endpoints:
  - mock: tone
    system_tag: tone
    seed: 1
  - mock: noise
    system_tag: noise
    seed: 2
  - mock: slow
    system_tag: slow
    latency: 0.05
    seed: 3
"""


def test_gateway_from_config_runs_a_battle(tmp_path, monkeypatch):
    monkeypatch.setenv("TUNEARENA_SALT", "an-environment-supplied-salt")
    config_path = tmp_path / "config.yaml"
    config_path.write_text(CONFIG.format(store=tmp_path / "store"))

    async def main():
        gateway = await build_gateway(config_path)
        assert len(gateway.registry.descriptors()) == 3
        _, digest = gateway.consent()
        session = gateway.create_session(digest)
        identity = scrub_identity(UserIdentity(ip="198.51.100.77"), gateway.salt)
        blind = await gateway.create_battle(
            session.uuid, "slow tape loops, no vocals", identity
        )
        return gateway, blind

    gateway, blind = asyncio.run(main())
    assert gateway.store.get(blind.battle_uuid) is not None
    snapshot = load_descriptor_snapshot(gateway.store.root)
    assert {d.key.system_tag for d in snapshot} == {"tone", "noise", "slow"}


def test_config_rejects_unknown_gateway_keys(tmp_path, monkeypatch):
    monkeypatch.setenv("TUNEARENA_SALT", "an-environment-supplied-salt")
    config_path = tmp_path / "config.yaml"
    config_path.write_text(
        "store: {}\ngateway:\n  listen_gate: 4\nendpoints: []\n".format(tmp_path / "s")
    )
    with pytest.raises(ValueError, match="unknown gateway config keys"):
        asyncio.run(build_gateway(config_path))
