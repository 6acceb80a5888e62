"""Command line interface. Exit codes: 0 ok, 1 domain error, 2 usage error."""

from __future__ import annotations

import sys
from dataclasses import replace
from pathlib import Path

import click

from . import klm
from .errors import NotFoundError, SearchServiceError
from .execution import (
    default_registry,
    detect_strategy,
    execute,
    plan_from_template,
    apply_modifier,
    _resolve_modifiers,
)
from .extraction import enrich_in_target, result_set_to_text
from .httpclient import HttpxFetcher
from .model import (
    SearchQuery,
    canonical_json,
    deserialize,
    export_bundle,
    import_bundle,
    serialize,
    validate_spec,
)
from .store import SpecStore
from .visualizers import TableModel, default_registry as visualizer_registry

DEFAULT_STORE_DIR = "~/.searchsvc/services"
CELL_LIMIT = 40


def _store(store_dir: str | None) -> SpecStore:
    return SpecStore(Path(store_dir or DEFAULT_STORE_DIR).expanduser())


def _load_spec(store: SpecStore, ref: str):
    """Accept a stored service id or a path to a spec file."""
    path = Path(ref)
    if path.exists() and path.is_file():
        return deserialize(path.read_text("utf-8"))
    return store.load(ref)


def _fail(exc: SearchServiceError):
    click.echo(f"error [{exc.code}]: {exc}", err=True)
    sys.exit(1)


store_dir_option = click.option(
    "--store-dir", envvar="SVC_STORE_DIR", default=None,
    help="Directory holding saved service specs.")


@click.group()
def main():
    """Declarative search services over third-party search UIs."""


@main.command("list")
@store_dir_option
def list_cmd(store_dir):
    """List stored services."""
    for spec in _store(store_dir).list():
        variant = spec.strategy.variant if spec.strategy else "(draft)"
        click.echo(f"{spec.id}  {spec.name}  [{variant}]")


@main.command()
@click.argument("ref")
@store_dir_option
def show(ref, store_dir):
    """Print one service spec as canonical JSON."""
    try:
        spec = _load_spec(_store(store_dir), ref)
    except SearchServiceError as exc:
        _fail(exc)
    click.echo(serialize(spec), nl=False)


@main.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
def validate(file):
    """Validate a spec file; exit 1 when it has errors."""
    try:
        spec = deserialize(Path(file).read_text("utf-8"))
    except SearchServiceError as exc:
        _fail(exc)
    report = validate_spec(spec)
    for problem in report.problems:
        click.echo(f"{problem.severity}: {problem.path}: {problem.message}")
    if not report.ok:
        sys.exit(1)
    click.echo("ok")


@main.command("import")
@click.argument("bundle_file", type=click.Path(exists=True, dir_okay=False))
@store_dir_option
def import_cmd(bundle_file, store_dir):
    """Import services from a bundle file."""
    store = _store(store_dir)
    try:
        result = import_bundle(Path(bundle_file).read_text("utf-8"),
                               existing_ids=store.ids())
    except SearchServiceError as exc:
        _fail(exc)
    for spec in result.imported:
        store.save(spec)
        click.echo(f"imported {spec.id}  {spec.name}")
    for rejected in result.rejected:
        click.echo(f"rejected entry {rejected.index} ({rejected.name}): "
                   f"{rejected.reason}", err=True)
    if result.rejected and not result.imported:
        sys.exit(1)


@main.command()
@click.argument("ids", nargs=-1)
@click.option("--output", "-o", type=click.Path(dir_okay=False), default=None)
@store_dir_option
def export(ids, output, store_dir):
    """Export services (all of them when no ids are given) as a bundle."""
    store = _store(store_dir)
    try:
        specs = [store.load(i) for i in ids] if ids else store.list()
    except SearchServiceError as exc:
        _fail(exc)
    bundle = export_bundle(specs)
    if output:
        Path(output).write_text(bundle, "utf-8")
        click.echo(f"wrote {output}")
    else:
        click.echo(bundle, nl=False)


@main.command()
@click.argument("ref")
@click.option("--probe", "probes", multiple=True,
              help="Probe keywords (give exactly two).")
@click.option("--save/--no-save", default=False,
              help="Persist the detected strategy into the stored service.")
@store_dir_option
def detect(ref, probes, save, store_dir):
    """Detect which execution strategy drives a service's engine."""
    if len(probes) != 2:
        raise click.UsageError("provide exactly two --probe values")
    store = _store(store_dir)
    try:
        spec = _load_spec(store, ref)
        config = detect_strategy(replace(spec, strategy=None),
                                 probes[0], probes[1],
                                 HttpxFetcher(politeness_seconds=0))
    except SearchServiceError as exc:
        _fail(exc)
    click.echo(f"variant: {config.variant}")
    template = config.request_template
    click.echo(f"template: {template.method} {template.url_template} "
               f"[{template.response_kind}]")
    if save:
        store.save(replace(spec, strategy=config))
        click.echo(f"saved strategy into {spec.id}")


def _print_table(model: TableModel):
    if not model.rows:
        click.echo("(no results)")
        return
    widths = [
        min(CELL_LIMIT,
            max(len(col), *(len(row[i]) for row in model.rows)))
        for i, col in enumerate(model.columns)
    ]

    def clip(text: str, width: int) -> str:
        if len(text) > width:
            return text[: width - 1] + "…"
        return text.ljust(width)

    click.echo("  ".join(clip(c, w) for c, w in zip(model.columns, widths)))
    click.echo("  ".join("-" * w for w in widths))
    for row in model.rows:
        click.echo("  ".join(clip(cell, w) for cell, w in zip(row, widths)))


@main.command()
@click.argument("ref")
@click.argument("keywords")
@click.option("--filter", "filters", multiple=True, help="Activate a named filter.")
@click.option("--order", default=None, help="Activate a named ordering.")
@click.option("--page", default=1, type=int)
@click.option("--enrich", is_flag=True, help="Fetch target pages for in-target properties.")
@click.option("--viz", default=None, help="Visualizer id (table_of_properties, ...).")
@click.option("--viz-option", "viz_options", multiple=True, metavar="NAME=VALUE",
              help="Visualizer option, repeatable (e.g. property=author).")
@click.option("--json", "as_json", is_flag=True, help="Print the raw result set JSON.")
@click.option("--dry-run", is_flag=True, help="Print the derived request plan, do not fetch.")
@store_dir_option
def search(ref, keywords, filters, order, page, enrich, viz, viz_options,
           as_json, dry_run, store_dir):
    """Run a search through a stored service (or a spec file)."""
    try:
        spec = _load_spec(_store(store_dir), ref)
        query = SearchQuery(keywords=keywords, active_filters=tuple(filters),
                            active_ordering=order, page=page)
        if dry_run:
            if spec.strategy is None or spec.strategy.request_template is None:
                raise NotFoundError("service has no request template to show")
            plan = plan_from_template(spec.strategy.request_template,
                                      keywords, page)
            modifiers, _ = _resolve_modifiers(spec, query)
            for modifier in modifiers:
                plan = apply_modifier(plan, modifier, keywords, page)
            click.echo(plan.describe())
            return
        fetcher = HttpxFetcher(politeness_seconds=0)
        result_set, _cursor = execute(spec, query, fetcher,
                                      registry=default_registry)
        if enrich:
            items = enrich_in_target(list(result_set.items), spec.result_spec,
                                     fetcher)
            result_set = replace(result_set, items=tuple(items))
    except SearchServiceError as exc:
        _fail(exc)

    if as_json:
        click.echo(result_set_to_text(result_set), nl=False)
        return
    options = {}
    for pair in viz_options:
        name, sep, value = pair.partition("=")
        if not sep:
            raise click.UsageError(f"--viz-option needs NAME=VALUE, got {pair!r}")
        options[name] = value
    try:
        model = visualizer_registry.render(result_set, viz or None, options)
    except SearchServiceError as exc:
        _fail(exc)
    if isinstance(model, TableModel):
        _print_table(model)
    else:
        click.echo(canonical_json(model.to_json()), nl=False)


@main.group("klm")
def klm_group():
    """Interaction-time estimation."""


@klm_group.command("estimate")
@click.argument("scenario_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--compare", "compare_file", default=None,
              type=click.Path(exists=True, dir_okay=False),
              help="Second scenario; prints both totals and the delta.")
@click.option("--per-step", is_flag=True, help="Also print one line per step.")
def klm_estimate(scenario_file, compare_file, per_step):
    """Estimate a scenario's total interaction time in seconds."""
    try:
        scenario = klm.load_scenario(Path(scenario_file).read_text("utf-8"))
        table = klm.OperatorTable()
        if compare_file:
            other = klm.load_scenario(Path(compare_file).read_text("utf-8"))
            result = klm.compare(scenario, other, table)
            click.echo(f"total A: {klm.format_seconds(result.total_a)}")
            click.echo(f"total B: {klm.format_seconds(result.total_b)}")
            click.echo(f"delta:   {klm.format_seconds(result.delta)}")
            return
        if per_step:
            for step in scenario.steps:
                click.echo(f"{klm.format_seconds(step.duration(table)):>8}  "
                           f"{step.label}")
        click.echo(klm.format_seconds(klm.estimate(scenario, table)))
    except SearchServiceError as exc:
        _fail(exc)


@main.command()
@click.option("--port", envvar="SVC_PORT", default=8750, type=int)
@click.option("--host", default="127.0.0.1")
@store_dir_option
def serve(port, host, store_dir):
    """Run the HTTP API."""
    import uvicorn

    from .api import create_app

    app = create_app(str(Path(store_dir or DEFAULT_STORE_DIR).expanduser()))
    uvicorn.run(app, host=host, port=port)


@main.group()
def fixtures():
    """The local deterministic fixture engines."""


@fixtures.command("serve")
@click.option("--port", envvar="SVC_FIXTURE_PORT", default=8751, type=int)
def fixtures_serve(port):
    """Run the fixture search engines (blocks until interrupted)."""
    from .fixtures import serve as serve_fixtures

    try:
        server = serve_fixtures(port)
    except SearchServiceError as exc:
        _fail(exc)
    click.echo(f"fixture engines on {server.base_url} "
               f"(/form /ajax /type /scroll /jsonapi)")
    try:
        import time

        while True:
            time.sleep(3600)
    except KeyboardInterrupt:
        server.stop()


if __name__ == "__main__":
    main()
