"""Command-line client: the mutation side of the observatory.

The HTTP API is read-only; everything that changes state runs here:
  simulate  generate a scenario and serve its mock platforms
  crawl     run one crawl cycle over the configured adapters
  rebuild   recompute all artifacts and publish a snapshot
  serve     start the read-only API over the data root
  report    print growth and seasonality from the latest snapshot
"""

from __future__ import annotations

import sys
from pathlib import Path

import click
import uvicorn

from . import __version__
from .bootstrap import ingest_fixtures
from .config import LinkScheduleEntry, ObservatoryConfig
from .errors import OlxError, SeasonalSpanError
from .index import growth_stats, seasonal_profile
from .ingest import crawl_cycle, load_adapters
from .pipeline import rebuild as run_rebuild
from .service import SnapshotCache, create_app
from .sim import MockPlatformServer, ScenarioConfig, generate
from .store import DataLayout, ObservationStore, SeenStore, WatermarkStore
from .taxonomy import PlatformRegistry


def _layout(data_dir: str | None, config: ObservatoryConfig) -> DataLayout:
    return DataLayout.from_env(data_dir or config.data_dir).ensure()


def _config(config_path: str | None) -> ObservatoryConfig:
    if config_path:
        return ObservatoryConfig.from_yaml(config_path)
    return ObservatoryConfig()


@click.group()
@click.version_option(__version__)
def main():
    """Online labour observatory pipeline."""


@main.command()
@click.argument("scenario")
@click.option("--data-dir", envvar="OLX_DATA_DIR", default=None, help="Data root (else $OLX_DATA_DIR).")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8081, show_default=True, help="Mock platform server port.")
@click.option("--serve/--no-serve", "serve_flag", default=True, help="Keep mock platforms running.")
@click.option("--ingest-direct", is_flag=True, help="Bulk-load fixtures into the data root.")
@click.option("--emit-adapters", type=click.Path(), default=None, help="Write adapter YAMLs here.")
@click.option("--emit-config", type=click.Path(), default=None, help="Write a matching olx.yaml here.")
@click.option("--scale", type=float, default=1.0, show_default=True, help="Volume scale factor.")
def simulate(scenario, data_dir, host, port, serve_flag, ingest_direct, emit_adapters, emit_config, scale):
    """Generate SCENARIO (name or path) and serve its mock platforms."""
    try:
        path = Path(scenario)
        cfg = ScenarioConfig.from_file(path) if path.exists() else ScenarioConfig.named(scenario)
        if scale != 1.0:
            cfg = cfg.scaled(scale)
        click.echo(f"generating scenario {cfg.name!r} (seed {cfg.seed})...")
        fixtures = generate(cfg)
        click.echo(
            f"generated {fixtures.ledger.total_postings():,} postings and "
            f"{len(fixtures.ledger.workers):,} worker observations "
            f"across {len(fixtures.platforms)} platforms"
        )

        if ingest_direct:
            layout = DataLayout.from_env(data_dir).ensure()
            counts = ingest_fixtures(fixtures, layout)
            click.echo(
                f"ingested directly into {layout.root}: "
                f"{counts['postings']:,} postings, {counts['workers']:,} workers"
            )

        base_url = f"http://{host}:{port}"
        if emit_adapters:
            adapters_dir = Path(emit_adapters)
            adapters_dir.mkdir(parents=True, exist_ok=True)
            for adapter in fixtures.adapter_configs(base_url):
                adapter.to_yaml(adapters_dir / f"{adapter.platform_id}.yaml")
            click.echo(f"wrote {len(fixtures.platforms)} adapter configs to {adapters_dir}")
        if emit_config:
            observatory = ObservatoryConfig(
                data_dir=data_dir,
                adapters_dir=str(emit_adapters) if emit_adapters else "adapters",
                window_days=cfg.window_days,
                base_date=cfg.base_date,
                link_schedule=tuple(
                    LinkScheduleEntry(plan.link_date, plan.platforms_added)
                    for plan in cfg.link_schedule
                ),
            )
            observatory.to_yaml(emit_config)
            click.echo(f"wrote observatory config to {emit_config}")

        if serve_flag:
            server = MockPlatformServer(fixtures, host=host, port=port).start()
            click.echo(f"mock platforms listening on {server.base_url} (Ctrl-C to stop)")
            try:
                server._thread.join()
            except KeyboardInterrupt:
                click.echo("stopping mock platforms")
            finally:
                server.stop()
    except OlxError as exc:
        raise click.ClickException(str(exc)) from exc


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--data-dir", envvar="OLX_DATA_DIR", default=None)
@click.option("--adapters", "adapters_dir", default=None, help="Directory of adapter YAMLs.")
@click.option("--worker-sample", type=int, default=None, help="Profiles to sample per platform.")
@click.option("--parallel", type=int, default=None, help="Concurrent platform fetches.")
def crawl(config_path, data_dir, adapters_dir, worker_sample, parallel):
    """Run one crawl cycle: fetch new postings, dedup, persist, advance."""
    config = _config(config_path).with_overrides(
        adapters_dir=adapters_dir,
        worker_sample_size=worker_sample,
        crawl_parallelism=parallel,
    )
    layout = _layout(data_dir, config)
    try:
        adapters = load_adapters(config.adapters_dir)
        if not adapters:
            raise OlxError(f"no adapter configs found under {config.adapters_dir!r}")
        report = crawl_cycle(
            registry=PlatformRegistry.default(),
            adapters=adapters,
            store=ObservationStore(layout),
            seen=SeenStore(layout),
            watermarks=WatermarkStore(layout),
            worker_seen=SeenStore(layout, kind="workers"),
            worker_sample_size=config.worker_sample_size,
            worker_seed=config.worker_seed,
            max_workers=config.crawl_parallelism,
        )
    except OlxError as exc:
        raise click.ClickException(str(exc)) from exc
    for pid in sorted(report.platforms):
        entry = report.platforms[pid]
        if entry.ok:
            click.echo(
                f"{pid}: +{entry.new_postings} postings"
                + (f", +{entry.new_workers} workers" if entry.new_workers else "")
                + (f", {entry.skipped} skipped" if entry.skipped else "")
            )
        else:
            click.echo(f"{pid}: ERROR {entry.error}", err=True)
    click.echo(f"total new postings: {report.total_new_postings}")
    if report.failed_platforms:
        raise click.ClickException(f"platforms failed: {', '.join(report.failed_platforms)}")


@main.command("rebuild")
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--data-dir", envvar="OLX_DATA_DIR", default=None)
def rebuild_cmd(config_path, data_dir):
    """Recompute cube, index, shares and gender; publish one snapshot."""
    config = _config(config_path)
    layout = _layout(data_dir, config)
    try:
        snapshot_id = run_rebuild(layout, PlatformRegistry.default(), config)
    except OlxError as exc:
        raise click.ClickException(str(exc)) from exc
    click.echo(f"published snapshot {snapshot_id}")


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--data-dir", envvar="OLX_DATA_DIR", default=None)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8080, show_default=True)
@click.option("--static", "static_dir", type=click.Path(), default=None,
              help="Directory of dashboard assets to serve at /.")
def serve(config_path, data_dir, host, port, static_dir):
    """Start the read-only HTTP API."""
    config = _config(config_path)
    layout = _layout(data_dir, config)
    app = create_app(layout, PlatformRegistry.default(), static_dir=static_dir)
    click.echo(f"serving API on http://{host}:{port} (data root: {layout.root})")
    uvicorn.run(app, host=host, port=port, log_level="info")


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--data-dir", envvar="OLX_DATA_DIR", default=None)
@click.option("--domain", type=click.Choice(["ALL", "EN", "ES", "RU"]), default="ALL")
def report(config_path, data_dir, domain):
    """Print growth statistics and the seasonal profile."""
    config = _config(config_path)
    layout = _layout(data_dir, config)
    try:
        cache = SnapshotCache(layout, PlatformRegistry.default())
        data = cache.current()
        series = cache.series(data, domain)
    except OlxError as exc:
        raise click.ClickException(str(exc)) from exc

    stats = growth_stats(series, series.base_date, series.last_date)
    click.echo(f"snapshot {data.snapshot_id}, domain {domain}")
    click.echo(f"index span: {series.first_date} .. {series.last_date} (base {series.base_date})")
    click.echo(f"final index value: {series.points[series.last_date]:.2f}")
    click.echo(
        f"total growth {stats.t0} -> {stats.t1}: {stats.total_growth * 100:+.1f}%"
    )
    click.echo(f"annualized growth (CAGR): {stats.annualized * 100:+.2f}%")
    for event in series.link_events:
        click.echo(
            f"chain link {event.link_date}: +{','.join(sorted(event.platforms_added))}"
            f" (factor {event.link_factor:.6f})"
        )
    try:
        factors = seasonal_profile(series)
    except SeasonalSpanError:
        click.echo("seasonal profile: not enough complete months (needs 24)")
        return
    months = "Jan Feb Mar Apr May Jun Jul Aug Sep Oct Nov Dec".split()
    click.echo("seasonal profile (mean 1.0):")
    for m in range(1, 13):
        click.echo(f"  {months[m - 1]}: {factors[m]:.3f}")


if __name__ == "__main__":
    main()
