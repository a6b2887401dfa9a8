"""Command line interface: service runners, a scripted battle client, and
offline data tools (export, verify, leaderboard)."""

from __future__ import annotations

import asyncio
import csv
import json
import sys
import time

import click


@click.group()
def main() -> None:
    """Blind pairwise listening-test platform."""


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8100, show_default=True)
def serve(config_path: str, host: str, port: int) -> None:
    """Run the gateway service."""
    import uvicorn

    from tunearena.compose import build_gateway
    from tunearena.gateway import build_service_app

    gateway = asyncio.run(build_gateway(config_path))
    click.echo(f"registered systems: {[d.key.label() for d in gateway.registry.descriptors()]}")
    uvicorn.run(build_service_app(gateway), host=host, port=port)


@main.command("mock-endpoint")
@click.option("--kind", type=click.Choice(["tone", "noise", "slow", "flaky"]), required=True)
@click.option("--system-tag", required=True)
@click.option("--variant-tag", default="default", show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8101, show_default=True)
def mock_endpoint(kind: str, system_tag: str, variant_tag: str, seed: int, host: str, port: int) -> None:
    """Serve one mock generation endpoint over the wire protocol."""
    import uvicorn

    from tunearena.endpoints import build_endpoint_app, build_mock_system

    system = build_mock_system(kind, system_tag, variant_tag, seed=seed)
    uvicorn.run(build_endpoint_app(system), host=host, port=port)


@main.command()
@click.option("--base-url", default="http://127.0.0.1:8100", show_default=True)
@click.option("--prompt", required=True)
@click.option("--listen-seconds", default=5.0, show_default=True)
@click.option("--vote", "preference", type=click.Choice(["A", "B", "TIE", "BOTH_BAD"]), default="A")
@click.option("--feedback", default=None)
def battle(base_url: str, prompt: str, listen_seconds: float, preference: str, feedback: str | None) -> None:
    """Run one scripted battle against a live service (thin demo client)."""
    import httpx

    with httpx.Client(base_url=base_url, timeout=180.0) as client:
        consent = client.get("/consent").json()
        session = client.post(
            "/sessions", json={"ack_tos": consent["digest"], "frontend_version": "cli/0.1"}
        ).json()
        click.echo(f"session {session['session_uuid']}")
        response = client.post(
            "/battles", json={"session_uuid": session["session_uuid"], "prompt": prompt}
        )
        if response.status_code != 200:
            raise click.ClickException(f"battle failed: {response.text}")
        blind = response.json()
        click.echo(f"battle {blind['battle_uuid']}: listening blind to A and B ...")
        for side in ("a", "b"):
            audio = client.get(blind[f"{side}_audio_url"])
            click.echo(f"  track {side.upper()}: {len(audio.content)} bytes")
        now = time.time()
        for side in ("A", "B"):
            client.post(
                f"/battles/{blind['battle_uuid']}/listen",
                json={
                    "side": side,
                    "events": [["PLAY", now - listen_seconds], ["PAUSE", now]],
                },
            ).raise_for_status()
        reveal = client.post(
            f"/battles/{blind['battle_uuid']}/vote",
            json={"session_uuid": session["session_uuid"], "preference": preference},
        )
        if reveal.status_code != 200:
            raise click.ClickException(f"vote rejected: {reveal.text}")
        body = reveal.json()
        for side in ("a", "b"):
            info = body[side]
            click.echo(
                f"  {side.upper()}: {info['system']['system_tag']}:{info['system']['variant_tag']}"
                f" generated {info['duration_seconds']:.1f}s in {info['generation_seconds']:.2f}s"
                f" (RTF {info['rtf']:.1f}x)"
            )
        if body.get("download_url"):
            click.echo(f"  download: {base_url}{body['download_url']}")
        if feedback:
            client.post(
                f"/battles/{blind['battle_uuid']}/feedback", json={"feedback": feedback}
            ).raise_for_status()
            click.echo("  feedback recorded")


@main.command()
@click.option("--store", "store_dir", required=True, type=click.Path(exists=True))
@click.option("--period", required=True, help="closed calendar month, YYYY-MM")
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--salt-version", default=None, help="defaults to TUNEARENA_SALT_VERSION")
def export(store_dir: str, period: str, out_dir: str, salt_version: str | None) -> None:
    """Export the rolling data release for a closed month."""
    import os

    from tunearena.compose import load_descriptor_snapshot
    from tunearena.store import BattleStore, export_release

    store = BattleStore(store_dir)
    descriptors = load_descriptor_snapshot(store.root)
    if not descriptors:
        raise click.ClickException(
            f"no descriptor snapshot in {store_dir}; run the gateway against this "
            "store once so audio releasability is known"
        )
    version = salt_version or os.environ.get("TUNEARENA_SALT_VERSION", "v1")
    try:
        manifest, path = export_release(
            store, descriptors, period, out_dir, salt_version=version
        )
    except ValueError as exc:
        raise click.ClickException(str(exc))
    click.echo(
        f"released {manifest.record_count} battles "
        f"(+{manifest.incomplete_count} incomplete) to {path}"
    )
    for exclusion in manifest.excluded_audio:
        click.echo(f"  audio excluded for {exclusion.system_key.label()}: {exclusion.reason}")


@main.command()
@click.option("--release", "release_dir", required=True, type=click.Path(exists=True))
@click.option("--store", "store_dir", default=None, type=click.Path(exists=True))
def verify(release_dir: str, store_dir: str | None) -> None:
    """Re-check a release: digests, scrub-cleanliness, completeness."""
    from tunearena.store import BattleStore, verify_release

    store = BattleStore(store_dir) if store_dir else None
    report = verify_release(release_dir, store)
    if report.ok:
        click.echo(
            f"release OK: {report.record_count} battles, "
            f"{report.incomplete_count} incomplete"
        )
        return
    for problem in report.problems:
        click.echo(f"PROBLEM: {problem}", err=True)
    sys.exit(1)


@main.command()
@click.option("--store", "store_dir", required=True, type=click.Path(exists=True))
@click.option("--period", default=None, help="restrict to battles voted in YYYY-MM")
@click.option("--sort", "sort_key", default="arena_score", show_default=True)
@click.option("--filter", "filters", multiple=True, help="column=value, repeatable")
@click.option("--out", "table_path", required=True, type=click.Path())
@click.option("--scatter", "scatter_path", default=None, type=click.Path())
@click.option("--resamples", default=1000, show_default=True)
@click.option("--seed", default=0, show_default=True)
def leaderboard(
    store_dir: str,
    period: str | None,
    sort_key: str,
    filters: tuple[str, ...],
    table_path: str,
    scatter_path: str | None,
    resamples: int,
    seed: int,
) -> None:
    """Fit scores from the store and write the table (and scatter) CSVs."""
    from tunearena.compose import load_descriptor_snapshot
    from tunearena.domain.types import BattleRecord
    from tunearena.leaderboard import TABLE_COLUMNS, build_entries, emit_leaderboard
    from tunearena.leaderboard.report import SCATTER_COLUMNS
    from tunearena.store import BattleStore
    from tunearena.store.export import month_of

    store = BattleStore(store_dir)
    records = [
        r
        for r in store.latest_records().values()
        if isinstance(r, BattleRecord) and r.vote is not None
    ]
    if period:
        records = [r for r in records if month_of(r.vote.preference_time) == period]
    if not records:
        raise click.ClickException("no voted battles in scope")
    filter_map = {}
    for item in filters:
        if "=" not in item:
            raise click.ClickException(f"--filter expects column=value, got {item!r}")
        key, value = item.split("=", 1)
        filter_map[key] = value
    entries = build_entries(
        records,
        load_descriptor_snapshot(store.root),
        n_resamples=resamples,
        seed=seed,
    )
    try:
        table, scatter = emit_leaderboard(entries, sort_key=sort_key, filters=filter_map)
    except ValueError as exc:
        raise click.ClickException(str(exc))
    with open(table_path, "w", newline="", encoding="utf-8") as f:
        writer = csv.DictWriter(f, fieldnames=list(TABLE_COLUMNS))
        writer.writeheader()
        writer.writerows(table)
    click.echo(f"wrote {len(table)} rows to {table_path}")
    if scatter_path:
        with open(scatter_path, "w", newline="", encoding="utf-8") as f:
            writer = csv.DictWriter(f, fieldnames=list(SCATTER_COLUMNS))
            writer.writeheader()
            writer.writerows(scatter)
        click.echo(f"wrote scatter data to {scatter_path}")


@main.command("show-battle")
@click.option("--store", "store_dir", required=True, type=click.Path(exists=True))
@click.argument("battle_uuid")
def show_battle(store_dir: str, battle_uuid: str) -> None:
    """Print one stored battle record as canonical JSON."""
    from tunearena.domain import battle_to_dict
    from tunearena.store import BattleStore

    record = BattleStore(store_dir).get(battle_uuid)
    if record is None:
        raise click.ClickException(f"no battle {battle_uuid}")
    click.echo(json.dumps(battle_to_dict(record), indent=2))


if __name__ == "__main__":
    main()
