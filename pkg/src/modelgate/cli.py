"""Command line front end.

Exit codes: 0 success, 1 domain error (unknown entry, illegal transition,
parse failure, ...), 2 usage error, and 3 for `assess` when the entry sits
at the vague stage so CI pipelines can gate on it.

The library root comes from `--root` or the MODELGATE_ROOT environment
variable and defaults to the current directory.
"""

from __future__ import annotations

import functools
import sys
from pathlib import Path

import click

from .assessor import AssessmentReport, Engine, assess_snapshot, render_json, render_text
from .errors import ModelGateError
from .gates import Stage, load_quality_config
from .store import QUALITY_CONFIG_NAME, Hat, LibraryStore, ReviewStatus
from .watch import ParseFailureEvent, ReportEvent, WatchSession
from .watch import watch as watch_loop


def domain_errors(fn):
    """Print store/parse errors as one line and exit 1."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ModelGateError as err:
            click.echo(f"error ({err.code}): {err}", err=True)
            sys.exit(1)

    return wrapper


def engine_for(root: Path) -> Engine:
    return Engine(LibraryStore(root))


def _echo_stage(report: AssessmentReport) -> None:
    click.echo(f"stage: {report.stage.label} ({report.stage.color})")
    if report.transition.demoted and report.transition.old is not None:
        click.echo(f"demoted from {report.transition.old.label}")
    if report.findings:
        click.echo(f"findings: {len(report.findings)}")


@click.group()
@click.option(
    "--root",
    type=click.Path(path_type=Path),
    default=".",
    envvar="MODELGATE_ROOT",
    help="Library root directory (or set MODELGATE_ROOT).",
)
@click.pass_context
def main(ctx: click.Context, root: Path) -> None:
    """Quality-gated library for evolving class models."""
    ctx.obj = root


@main.command()
@click.argument("directory", type=click.Path(path_type=Path))
@domain_errors
def init(directory: Path) -> None:
    """Create an empty model library in DIRECTORY."""
    LibraryStore.init(directory)
    click.echo(f"initialized empty model library in {directory}")


@main.command()
@click.argument("entry_id")
@click.argument("file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--author", default="", help="Name recorded on the snapshot.")
@click.pass_obj
@domain_errors
def add(root: Path, entry_id: str, file: Path, author: str) -> None:
    """Add FILE as the first snapshot of a new entry."""
    engine = engine_for(root)
    _, report = engine.create_entry(entry_id, file.read_text("utf-8"), author)
    click.echo(f"added {entry_id} at snapshot 1")
    _echo_stage(report)


@main.command()
@click.argument("entry_id")
@click.argument("file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--author", default="", help="Name recorded on the snapshot.")
@click.pass_obj
@domain_errors
def commit(root: Path, entry_id: str, file: Path, author: str) -> None:
    """Commit FILE as the next snapshot of ENTRY_ID."""
    engine = engine_for(root)
    result, report = engine.commit(entry_id, file.read_text("utf-8"), author)
    if report is None:
        click.echo("no changes (content identical to head)")
        return
    click.echo(f"committed snapshot {result.snapshot.seq_no}")
    click.echo(f"delta: +{len(report.delta_new)} new, -{len(report.delta_resolved)} resolved")
    _echo_stage(report)


@main.command()
@click.argument("entry_id")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
@click.pass_obj
@domain_errors
def assess(root: Path, entry_id: str, fmt: str) -> None:
    """Re-assess ENTRY_ID and print the full report.

    Exits 3 when the stage is vague, so CI can fail fast.
    """
    engine = engine_for(root)
    report = engine.assess(entry_id)
    click.echo(render_json(report) if fmt == "json" else render_text(report), nl=False)
    if report.stage is Stage.VAGUE:
        sys.exit(3)


@main.command("stage")
@click.argument("entry_id")
@click.pass_obj
@domain_errors
def stage_cmd(root: Path, entry_id: str) -> None:
    """Print the current stage of ENTRY_ID (a pure read)."""
    store = LibraryStore(root)
    cached = store.load_last_assessment(entry_id)
    if cached is None:
        cfg = load_quality_config(store.root / QUALITY_CONFIG_NAME)
        report = assess_snapshot(store, entry_id, cfg, save=False)
        click.echo(f"{report.stage.label} ({report.stage.color})")
    else:
        click.echo(f"{cached['stage']} ({cached['color']})")


@main.command("watch")
@click.argument("entry_id")
@click.argument("file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--debounce", "debounce_ms", type=int, default=200, show_default=True,
              help="Quiet window in milliseconds before a save burst is assessed.")
@click.pass_obj
@domain_errors
def watch_cmd(root: Path, entry_id: str, file: Path, debounce_ms: int) -> None:
    """Assess FILE into ENTRY_ID on every save, until interrupted."""
    engine = engine_for(root)
    if entry_id not in engine.store.entry_ids():
        # let a watch session start on a brand new model file
        engine.create_entry(entry_id, file.read_text("utf-8"))
    session = WatchSession(path=file, entry_id=entry_id, debounce_ms=debounce_ms)
    click.echo(f"watching {file} (entry {entry_id}, debounce {debounce_ms} ms)")
    try:
        for event in watch_loop(engine, session):
            if isinstance(event, ReportEvent):
                r = event.report
                click.echo(
                    f"snapshot {r.seq_no}: stage {r.stage.label} ({r.stage.color}), "
                    f"{len(r.findings)} findings, "
                    f"+{len(r.delta_new)} new, -{len(r.delta_resolved)} resolved"
                )
            elif isinstance(event, ParseFailureEvent):
                click.echo(f"not committed: {event.error}")
            else:
                click.echo(f"watch ended: {event.reason}")
    except KeyboardInterrupt:
        click.echo("watch ended: interrupted")


@main.group()
def review() -> None:
    """File and work through hat reviews."""


@review.command("add")
@click.argument("entry_id")
@click.option("--hat", type=click.Choice([h.value for h in Hat]), required=True)
@click.option("--text", required=True)
@click.pass_obj
@domain_errors
def review_add(root: Path, entry_id: str, hat: str, text: str) -> None:
    """Open a review on ENTRY_ID's head snapshot."""
    engine = engine_for(root)
    rev, report = engine.add_review(entry_id, hat, text)
    click.echo(rev.review_id)
    _echo_stage(report)


@review.command("list")
@click.argument("entry_id")
@click.pass_obj
@domain_errors
def review_list(root: Path, entry_id: str) -> None:
    """List reviews of ENTRY_ID."""
    for rev in LibraryStore(root).reviews(entry_id):
        click.echo(
            f"{rev.review_id}  [{rev.hat.value}]  {rev.status.value}  "
            f"(snapshot {rev.snapshot_ref})  {rev.text}"
        )


def _set_review_status(root: Path, review_id: str, status: ReviewStatus) -> None:
    engine = engine_for(root)
    rev, report = engine.set_review_status(review_id, status)
    click.echo(f"{rev.review_id}: {rev.status.value}")
    _echo_stage(report)


@review.command("done")
@click.argument("review_id")
@click.pass_obj
@domain_errors
def review_done(root: Path, review_id: str) -> None:
    """Mark a review as worked in."""
    _set_review_status(root, review_id, ReviewStatus.DONE)


@review.command("reopen")
@click.argument("review_id")
@click.pass_obj
@domain_errors
def review_reopen(root: Path, review_id: str) -> None:
    """Reopen a review that was closed too early."""
    _set_review_status(root, review_id, ReviewStatus.REOPENED)


@main.command()
@click.argument("entry_id")
@click.argument("attribute")
@click.option("--verdict", type=click.Choice(["pass", "fail"]), required=True)
@click.option("--reviewer", default="", help="Name recorded on the attestation.")
@click.pass_obj
@domain_errors
def attest(root: Path, entry_id: str, attribute: str, verdict: str, reviewer: str) -> None:
    """Record a human verdict for a weak attribute on the head snapshot."""
    engine = engine_for(root)
    attestation, report = engine.attest(entry_id, attribute, verdict, reviewer)
    click.echo(
        f"attested {attestation.attribute.value}: {verdict} "
        f"(bound to {attestation.content_hash[:12]})"
    )
    _echo_stage(report)


@main.group()
def override() -> None:
    """Accept or re-flag individual medium findings."""


@override.command("add")
@click.argument("entry_id")
@click.argument("metric_id")
@click.argument("element_path")
@click.option("--why", "justification", default="", help="Why this finding is acceptable here.")
@click.option("--author", default="")
@click.pass_obj
@domain_errors
def override_add(
    root: Path, entry_id: str, metric_id: str, element_path: str, justification: str, author: str
) -> None:
    """Accept the finding METRIC_ID at ELEMENT_PATH with a justification."""
    engine = engine_for(root)
    _, report = engine.add_override(entry_id, metric_id, element_path, justification, author)
    click.echo(f"override recorded for {metric_id} at {element_path}")
    _echo_stage(report)


@override.command("revoke")
@click.argument("entry_id")
@click.argument("metric_id")
@click.argument("element_path")
@click.pass_obj
@domain_errors
def override_revoke(root: Path, entry_id: str, metric_id: str, element_path: str) -> None:
    """Put the finding METRIC_ID at ELEMENT_PATH back into force."""
    engine = engine_for(root)
    _, report = engine.revoke_override(entry_id, metric_id, element_path)
    click.echo(f"override revoked for {metric_id} at {element_path}")
    _echo_stage(report)


@main.command()
@click.option("--root", "serve_root", type=click.Path(path_type=Path), default=None,
              help="Library root to serve (defaults to the global --root).")
@click.option("--port", type=int, default=7070, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--read-only", is_flag=True, default=False,
              help="Serve GETs only; mutations get 403. Needs no writer lock.")
@click.pass_obj
@domain_errors
def serve(root: Path, serve_root: Path | None, port: int, host: str, read_only: bool) -> None:
    """Serve the library over HTTP: JSON API, event stream, dashboard."""
    import uvicorn

    from .server import create_app

    app = create_app(serve_root or root, read_only=read_only)
    uvicorn.run(app, host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
