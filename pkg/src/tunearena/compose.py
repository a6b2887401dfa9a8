"""Composition root: build a running platform from a YAML config file.

Example config:

    store: ./data/store
    gateway:
      listen_gate_seconds: 4.0
      rate_limit_per_minute: 60
      consent_text_file: ./consent.txt      # optional, default built in
    analyzer:
      kind: rules                           # or: remote
      rules_file: ./rules.yaml              # optional
      # base_url: http://analyzer.internal  # for kind: remote
    endpoints:
      - url: http://127.0.0.1:8101          # any service speaking the protocol
      - mock: tone                          # or run a mock in-process
        system_tag: tone
        seed: 1

The salt is supplied only via environment secret (TUNEARENA_SALT), never the
config file.
"""

from __future__ import annotations

import dataclasses
from pathlib import Path
from typing import Any

import httpx
import yaml

from tunearena.endpoints import HttpEndpoint, build_endpoint_app, build_mock_system
from tunearena.endpoints.descriptor import SystemDescriptor
from tunearena.gate import RemoteAnalyzer, RuleAnalyzer, RuleConfig
from tunearena.gateway import EndpointRegistry, Gateway, GatewayConfig
from tunearena.privacy import SaltConfig
from tunearena.store import BattleStore

DESCRIPTOR_SNAPSHOT = "descriptors.json"


def load_config(path: str | Path) -> dict:
    raw = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
    if not isinstance(raw, dict):
        raise ValueError("config must be a YAML mapping")
    return raw


def gateway_config_from(raw: dict) -> GatewayConfig:
    section: dict[str, Any] = dict(raw.get("gateway", {}))
    consent_file = section.pop("consent_text_file", None)
    if consent_file:
        section["consent_text"] = Path(consent_file).read_text(encoding="utf-8")
    known = {f.name for f in dataclasses.fields(GatewayConfig)}
    unknown = set(section) - known
    if unknown:
        raise ValueError(f"unknown gateway config keys: {sorted(unknown)}")
    return GatewayConfig(**section)


def analyzer_from(raw: dict):
    section = raw.get("analyzer", {"kind": "rules"})
    kind = section.get("kind", "rules")
    if kind == "rules":
        rules_file = section.get("rules_file")
        rules = RuleConfig.load(rules_file) if rules_file else RuleConfig.default()
        return RuleAnalyzer(rules)
    if kind == "remote":
        extra = {}
        # instruction templates live in versioned config files next to the
        # deployment; their digest is logged per battle for auditability
        if section.get("analyze_template_file"):
            extra["analyze_instructions"] = Path(
                section["analyze_template_file"]
            ).read_text(encoding="utf-8")
        if section.get("lyrics_template_file"):
            extra["lyrics_instructions"] = Path(
                section["lyrics_template_file"]
            ).read_text(encoding="utf-8")
        return RemoteAnalyzer(
            section["base_url"],
            timeout=float(section.get("timeout", 15.0)),
            retries=int(section.get("retries", 1)),
            **extra,
        )
    raise ValueError(f"unknown analyzer kind {kind!r}")


async def registry_from(raw: dict, clock) -> EndpointRegistry:
    registry = EndpointRegistry(
        cooldown_seconds=float(raw.get("gateway", {}).get("health_cooldown_seconds", 30.0)),
        clock=clock,
    )
    for spec in raw.get("endpoints", []):
        if "url" in spec:
            await registry.register(HttpEndpoint(spec["url"]))
        elif "mock" in spec:
            spec = dict(spec)
            kind = spec.pop("mock")
            tag = spec.pop("system_tag")
            variant = spec.pop("variant_tag", "default")
            system = build_mock_system(kind, tag, variant, clock=clock, **spec)
            client = httpx.AsyncClient(
                transport=httpx.ASGITransport(app=build_endpoint_app(system)),
                base_url="http://mock",
            )
            await registry.register(HttpEndpoint("http://mock", client=client))
        else:
            raise ValueError(f"endpoint entry needs 'url' or 'mock': {spec}")
    return registry


def save_descriptor_snapshot(store_root: str | Path, descriptors: list[SystemDescriptor]) -> None:
    """Persist registered capabilities so offline tools can read them later."""
    import json

    path = Path(store_root) / DESCRIPTOR_SNAPSHOT
    existing: dict[str, dict] = {}
    if path.exists():
        existing = {d["key"]["system_tag"] + ":" + d["key"]["variant_tag"]: d
                    for d in json.loads(path.read_text())}
    for descriptor in descriptors:
        existing[descriptor.key.label()] = descriptor.to_dict()
    ordered = [existing[k] for k in sorted(existing)]
    path.write_text(json.dumps(ordered, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def load_descriptor_snapshot(store_root: str | Path) -> list[SystemDescriptor]:
    import json

    path = Path(store_root) / DESCRIPTOR_SNAPSHOT
    if not path.exists():
        return []
    return [SystemDescriptor.from_dict(d) for d in json.loads(path.read_text())]


async def build_gateway(config_path: str | Path, *, clock=None) -> Gateway:
    import time

    raw = load_config(config_path)
    clock = clock or time.time
    registry = await registry_from(raw, clock)
    store = BattleStore(raw["store"], clock=clock)
    save_descriptor_snapshot(store.root, registry.descriptors())
    return Gateway(
        registry=registry,
        analyzer=analyzer_from(raw),
        store=store,
        salt=SaltConfig.from_env(),
        config=gateway_config_from(raw),
        clock=clock,
    )
