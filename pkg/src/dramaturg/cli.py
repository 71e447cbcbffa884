"""Command-line front end: session files in, script files out.

The CLI drives the engine directly against a session file; ``serve``
starts the HTTP studio service for interactive clients.
"""

from __future__ import annotations

import os
import sys
from pathlib import Path

import click

from .engine import Engine
from .errors import DramaturgError
from .gateway import Gateway, HttpBackend, MockBackend
from .metrics import length_stats, report_rows, session_edit_reports
from .model import LogLine
from .prompts import PromptSet, builtin_prompt_set, builtin_prompt_set_names, load_prompt_set
from .scriptio import (
    assemble_script,
    export_plaintext,
    load_session,
    save_session,
)


def _prompt_set(name: str, prompt_set_dir: str | None) -> PromptSet:
    directory = prompt_set_dir or os.environ.get("DRAMATURG_PROMPT_SET_DIR")
    if directory:
        path = Path(directory) / f"{name}.promptset"
        if path.exists():
            return load_prompt_set(path)
    if name in builtin_prompt_set_names():
        return builtin_prompt_set(name)
    raise click.ClickException(f"unknown prompt set {name!r}")


def _engine(prompt_set: PromptSet, backend_name: str) -> Engine:
    if backend_name == "http":
        backend = HttpBackend.from_env()
    else:
        backend = MockBackend()
    return Engine(prompt_set, Gateway(backend))


def _run(func, *args, **kwargs):
    try:
        return func(*args, **kwargs)
    except DramaturgError as exc:
        raise click.ClickException(str(exc)) from exc


@click.group()
def main() -> None:
    """Hierarchical script co-writing from a one-sentence log line."""


@main.command()
@click.option("--logline", required=True, help="One-to-few sentences of central conflict.")
@click.option("--prompt-set", "prompt_set_name", default="medea", show_default=True)
@click.option("--prompt-set-dir", default=None, help="Extra directory of .promptset files.")
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
def new(logline: str, prompt_set_name: str, prompt_set_dir: str | None, out_path: str) -> None:
    """Create a fresh session file."""
    prompt_set = _prompt_set(prompt_set_name, prompt_set_dir)
    engine = _engine(prompt_set, "mock")
    session = _run(lambda: engine.new_session(LogLine(logline)))
    save_session(session, out_path)
    click.echo(f"created session {session.id} at {out_path}")


def _load_engine_for(session_path: str, backend: str, prompt_set_dir: str | None):
    session = _run(load_session, session_path)
    prompt_set = _prompt_set(session.prompt_set_name, prompt_set_dir)
    return session, _engine(prompt_set, backend)


@main.command()
@click.argument("session_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--full", is_flag=True, help="Generate every unresolved slot in order.")
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--parallel/--serial", default=False, show_default=True)
@click.option("--backend", default="mock", type=click.Choice(["mock", "http"]), show_default=True)
@click.option("--prompt-set-dir", default=None)
def run(
    session_path: str,
    full: bool,
    seed: int,
    parallel: bool,
    backend: str,
    prompt_set_dir: str | None,
) -> None:
    """Autopilot: fill the whole hierarchy without intervention."""
    if not full:
        raise click.ClickException("run currently requires --full")
    session, engine = _load_engine_for(session_path, backend, prompt_set_dir)
    _run(engine.generate_full, session, seed=seed, parallel=parallel)
    save_session(session, session_path)
    click.echo(f"session {session.id} complete: {len(session.dialogue_slots)} scenes")


@main.command()
@click.argument("session_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--slot", "address", required=True, help="title | characters | plot | location:<name> | dialogue:<index>")
@click.option("--seed", default=None, type=int)
@click.option("--backend", default="mock", type=click.Choice(["mock", "http"]), show_default=True)
@click.option("--prompt-set-dir", default=None)
def gen(session_path: str, address: str, seed: int | None, backend: str, prompt_set_dir: str | None) -> None:
    """Generate one new candidate for a slot."""
    session, engine = _load_engine_for(session_path, backend, prompt_set_dir)
    candidate = _run(engine.generate, session, address, seed=seed)
    save_session(session, session_path)
    click.echo(f"slot {address}: candidate {len(session.slot(address).candidates) - 1} (seed {candidate.seed})")


@main.command()
@click.argument("session_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--slot", "address", required=True)
@click.option("--file", "text_file", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--text", default=None)
@click.option("--prompt-set-dir", default=None)
def edit(session_path: str, address: str, text_file: str | None, text: str | None, prompt_set_dir: str | None) -> None:
    """Replace a slot's text with your own (from --file or --text)."""
    if (text_file is None) == (text is None):
        raise click.ClickException("provide exactly one of --file or --text")
    new_text = Path(text_file).read_text(encoding="utf-8") if text_file else text
    session, engine = _load_engine_for(session_path, "mock", prompt_set_dir)
    _run(engine.apply_edit, session, address, new_text)
    save_session(session, session_path)
    click.echo(f"slot {address}: edited ({len(new_text)} chars)")


@main.command()
@click.argument("session_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
def export(session_path: str, out_path: str) -> None:
    """Assemble the complete script and write it as plain text."""
    session = _run(load_session, session_path)
    document = _run(assemble_script, session)
    Path(out_path).write_text(export_plaintext(document), encoding="utf-8")
    click.echo(f"wrote {out_path}")


@main.command()
@click.argument("session_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", default=None, type=click.Path(dir_okay=False))
@click.option("--plot-data", "plot_data_dir", default=None, type=click.Path(file_okay=False))
def metrics(session_path: str, out_path: str | None, plot_data_dir: str | None) -> None:
    """Edit-analytics report, one tab-separated row per slot."""
    session = _run(load_session, session_path)
    reports = session_edit_reports(session)
    lines = ["\t".join(row) for row in report_rows(reports)]
    output = "\n".join(lines) + "\n"
    if out_path:
        Path(out_path).write_text(output, encoding="utf-8")
    else:
        click.echo(output, nl=False)
    if plot_data_dir:
        directory = Path(plot_data_dir)
        directory.mkdir(parents=True, exist_ok=True)
        pairs = []
        for slot in session.all_slots():
            if slot.accepted is not None and slot.edited_text is not None:
                pairs.append((slot.candidates[slot.accepted].raw_text, slot.edited_text))
        if pairs:
            stats = length_stats(pairs)
            rows = ["delta\tnormalized_abs"] + [
                f"{delta}\t{norm:.6f}" for delta, norm in zip(stats.deltas, stats.normalized_abs)
            ]
            (directory / "length_deltas.tsv").write_text("\n".join(rows) + "\n", encoding="utf-8")
            click.echo(f"wrote {directory / 'length_deltas.tsv'}")


@main.command()
@click.option("--config", "config_path", default=None, type=click.Path(exists=True, dir_okay=False))
def serve(config_path: str | None) -> None:
    """Start the HTTP studio service."""
    import uvicorn

    from .service import create_app, load_config

    config = load_config(config_path)
    app = create_app(config)
    uvicorn.run(app, host=config.host, port=config.port)


if __name__ == "__main__":
    main(prog_name="dramaturg")
