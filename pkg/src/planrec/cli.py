"""Command-line surface: ingest, index, chat, eval, serve, export-plans."""

from __future__ import annotations

import json

import click

from .agent import TurnDelta, build_default_registry, parse_plan, validate_plan
from .catalog import load_catalog, load_interactions
from .doke import load_kg
from .embedding import HashingEmbedder
from .errors import PlanrecError
from .evaluation import format_table, write_report
from .retrieval import build_index, save_index
from .service import DIMENSIONS, build_agent, create_app, load_config, run_eval


@click.group()
def main():
    """Conversational recommender: data tooling, local chat, evaluation, serving."""


@main.command()
@click.option("--catalog", "catalog_path", required=True, type=click.Path(exists=True))
@click.option("--interactions", "interactions_path", type=click.Path(exists=True))
@click.option("--kg", "kg_path", type=click.Path(exists=True))
def ingest(catalog_path, interactions_path, kg_path):
    """Validate catalog, interaction, and knowledge-graph files."""
    try:
        with open(catalog_path, "rb") as fh:
            catalog = load_catalog(fh)
        click.echo(f"catalog: {len(catalog)} items, {len(catalog.schema)} attributes")
        if interactions_path:
            with open(interactions_path, "rb") as fh:
                store = load_interactions(fh, catalog)
            click.echo(
                f"interactions: {len(store)} kept over {len(store.users())} users, "
                f"{store.dropped} dropped"
            )
        if kg_path:
            with open(kg_path, "rb") as fh:
                kg = load_kg(fh)
            click.echo(f"kg: {len(kg)} triples, {len(kg.entities)} entities")
    except PlanrecError as exc:
        raise click.ClickException(str(exc))


@main.command()
@click.option("--catalog", "catalog_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", default="index.npz", show_default=True, type=click.Path())
def index(catalog_path, out_path):
    """Build the embedding index for a catalog and save it as .npz."""
    try:
        with open(catalog_path, "rb") as fh:
            catalog = load_catalog(fh)
        item_index = build_index(catalog, HashingEmbedder())
    except PlanrecError as exc:
        raise click.ClickException(str(exc))
    save_index(item_index, out_path)
    click.echo(
        f"indexed {len(item_index)} items at dimension {item_index.dimension} -> {out_path}"
    )


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--user", default="anonymous", show_default=True)
def chat(config_path, user):
    """Terminal REPL over a local agent session."""
    try:
        agent = build_agent(load_config(config_path))
    except (PlanrecError, ValueError) as exc:
        raise click.ClickException(str(exc))
    session = agent.new_session(user)
    click.echo("chat session started; empty line or Ctrl-D ends it")
    while True:
        try:
            text = click.prompt("you", prompt_suffix="> ")
        except (EOFError, click.Abort):
            break
        if not text.strip():
            break
        try:
            for event in agent.stream_turn(session, text):
                if isinstance(event, TurnDelta):
                    click.echo(event.text, nl=False)
            click.echo()
        except PlanrecError as exc:
            click.echo(f"[error] {exc}")
    agent.close_session(session)
    click.echo("session closed")


@main.command("eval")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--dimension", required=True, type=click.Choice(DIMENSIONS))
@click.option("--cases", "cases_path", required=True, type=click.Path(exists=True))
@click.option("--out-dir", default="eval-out", show_default=True, type=click.Path())
@click.option("--figures/--no-figures", default=True, show_default=True)
def eval_command(config_path, dimension, cases_path, out_dir, figures):
    """Run one evaluation dimension; write report JSON, CSV, and figures."""
    try:
        config = load_config(config_path)
        report = run_eval(config, dimension, cases_path)
    except (PlanrecError, ValueError) as exc:
        raise click.ClickException(str(exc))
    written = write_report(report, out_dir, figures=figures)
    click.echo(format_table(report))
    for path in written:
        click.echo(f"wrote {path}")


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
def serve(config_path):
    """Start the HTTP service (sessions, SSE chat, trace inspection)."""
    import uvicorn

    try:
        config = load_config(config_path)
    except (PlanrecError, ValueError) as exc:
        raise click.ClickException(str(exc))
    uvicorn.run(create_app(config), host=config.host, port=config.port)


@main.command("export-plans")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
def export_plans(config_path, out_path):
    """Export logged [instruction, plan] training pairs, re-validating each."""
    try:
        config = load_config(config_path)
    except (PlanrecError, ValueError) as exc:
        raise click.ClickException(str(exc))
    if config.plan_log is None:
        raise click.ClickException("config has no plan_log path")
    registry = build_default_registry()
    count = 0
    lines = []
    if config.plan_log.exists():
        for line_no, raw in enumerate(config.plan_log.read_bytes().splitlines(), start=1):
            line = raw.decode("utf-8").strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                plan = parse_plan(json.dumps(obj["plan"]))
                violations = validate_plan(plan, registry, bus_nonempty=True)
                if violations or "instruction" not in obj:
                    raise PlanrecError("; ".join(violations) or "missing instruction")
            except (PlanrecError, KeyError, json.JSONDecodeError) as exc:
                raise click.ClickException(f"plan log line {line_no}: {exc}")
            lines.append(
                json.dumps(
                    {"instruction": obj["instruction"], "plan": json.loads(plan.to_json())},
                    separators=(",", ":"),
                )
            )
            count += 1
    with open(out_path, "w", encoding="utf-8") as fh:
        for line in lines:
            fh.write(line + "\n")
    click.echo(f"exported {count} training pairs -> {out_path}")


if __name__ == "__main__":
    main()
