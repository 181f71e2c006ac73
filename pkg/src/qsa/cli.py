"""Command-line client: browse models, get recommendations, author models.

Exit codes follow the usual triad: 0 success, 1 a validate/lint run found
errors in the document, 2 usage or environment problems (unknown area or
attribute, malformed flag values, unreadable paths, failed binds).
"""

from __future__ import annotations

import json
import logging
import os
import socket
import sys
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from pathlib import Path

import click

from . import __version__
from .catalog import Catalog, load_builtin, load_dir
from .dot import model_to_dot
from .dsl import lint as lint_document
from .dsl import parse as parse_document
from .engine import (
    Recommendation,
    WeightVector,
    format_score,
    recommend,
    session_with,
)
from .errors import QsaError
from .interchange import model_to_doc, recommendation_to_doc
from .model import DecisionModel, Gateway, GatewayKind

_BACK = object()


class CliError(click.ClickException):
    """Usage/environment failure; exits 2 per the CLI contract."""

    exit_code = 2


@dataclass
class CliState:
    models_dir: str | None
    color: str

    def use_color(self) -> bool | None:
        """True/False force color on/off; None lets click auto-detect."""
        if self.color == "always":
            return True
        if self.color == "never" or os.environ.get("NO_COLOR"):
            return False
        return None


def _load_catalog(state: CliState) -> Catalog:
    try:
        if state.models_dir is not None:
            return load_dir(state.models_dir)
        return load_builtin()
    except QsaError as exc:
        raise CliError(f"{exc.code}: {exc.message}") from exc


def _get_model(catalog: Catalog, area: str) -> DecisionModel:
    try:
        return catalog.model(area)
    except QsaError as exc:
        raise CliError(f"{exc.code}: {exc.message}") from exc


def _parse_weight_flags(pairs: tuple[str, ...], weights_file: str | None) -> dict[str, Decimal]:
    weights: dict[str, Decimal] = {}
    if weights_file is not None:
        try:
            doc = json.loads(Path(weights_file).read_text(encoding="utf-8"))
        except OSError as exc:
            raise CliError(f"cannot read weights file: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise CliError(f"weights file is not valid JSON: {exc}") from exc
        if isinstance(doc, dict) and isinstance(doc.get("weights"), dict):
            doc = doc["weights"]
        if not isinstance(doc, dict):
            raise CliError("weights file must hold a JSON object of qa: value")
        for name, value in doc.items():
            weights[str(name)] = _parse_decimal(str(name), value)
    for pair in pairs:
        name, sep, value = pair.partition("=")
        if not sep or not name:
            raise CliError(f"weight {pair!r} is not in QA=VALUE form")
        weights[name] = _parse_decimal(name, value)
    return weights


def _parse_decimal(name: str, value: object) -> Decimal:
    try:
        return Decimal(str(value))
    except InvalidOperation:
        raise CliError(f"weight for {name!r} is not a number: {value!r}") from None


def _parse_answer_flags(pairs: tuple[str, ...]) -> dict[str, list[str]]:
    answers: dict[str, list[str]] = {}
    for pair in pairs:
        gateway, sep, branches = pair.partition("=")
        if not sep or not gateway or not branches:
            raise CliError(f"answer {pair!r} is not in GATEWAY=BRANCH[,BRANCH] form")
        labels = [label.strip() for label in branches.split(",") if label.strip()]
        if not labels:
            raise CliError(f"answer {pair!r} names no branches")
        answers.setdefault(gateway, []).extend(labels)
    return answers


def _echo_json(doc: object) -> None:
    click.echo(json.dumps(doc, indent=2, ensure_ascii=False))


def _render_recommendations(
    recs: tuple[Recommendation, ...], color: bool | None
) -> None:
    if not recs:
        click.echo("no patterns are active under the given answers")
        return
    for rank, rec in enumerate(recs, start=1):
        score = format_score(rec.score)
        fg = None
        if rec.score > 0:
            fg = "green"
        elif rec.score < 0:
            fg = "red"
        head = f"{rank:>2}. {rec.pattern}  score "
        click.echo(head + click.style(score, fg=fg), color=color)
        click.echo(f"    {rec.name}")
        if rec.improves:
            click.echo(
                "    " + click.style("+ " + ", ".join(rec.improves), fg="green"),
                color=color,
            )
        if rec.degrades:
            click.echo(
                "    " + click.style("- " + ", ".join(rec.degrades), fg="red"),
                color=color,
            )
        for constraint in rec.constraints:
            click.echo(f"    ! {constraint}")
        if rec.complements:
            click.echo("    ~ complements: " + ", ".join(rec.complements))
        if rec.path:
            click.echo("    via " + " -> ".join(rec.path))


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(__version__, prog_name="qsa")
@click.option(
    "--models",
    "models_dir",
    envvar="QSA_MODELS_DIR",
    metavar="DIR",
    default=None,
    help="Load models from a directory of .qdm files instead of the bundle.",
)
@click.option(
    "--color",
    type=click.Choice(["auto", "always", "never"]),
    default="auto",
    show_default=True,
    help="Colorize output (NO_COLOR is honored under auto).",
)
@click.pass_context
def main(ctx: click.Context, models_dir: str | None, color: str) -> None:
    """Decision support for quantum software architecture."""
    ctx.obj = CliState(models_dir=models_dir, color=color)


@main.command("list")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
@click.pass_obj
def cmd_list(state: CliState, fmt: str) -> None:
    """List the loaded design areas."""
    catalog = _load_catalog(state)
    rows = [
        {
            "area": area,
            "title": catalog.model(area).meta.title,
            "patterns": len(catalog.model(area).patterns),
        }
        for area in catalog.areas
    ]
    if fmt == "json":
        _echo_json(rows)
        return
    for row in rows:
        click.echo(f"{row['area']:<26} {row['title']:<30} {row['patterns']:>3} patterns")


@main.command("show")
@click.argument("area")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
@click.pass_obj
def cmd_show(state: CliState, area: str, fmt: str) -> None:
    """Show one area's model: gateways, branches, and patterns."""
    catalog = _load_catalog(state)
    model = _get_model(catalog, area)
    if fmt == "json":
        _echo_json(model_to_doc(model))
        return
    meta = model.meta
    click.echo(f"{model.area.value} — {meta.title} (version {meta.version})")
    for source in meta.sources:
        click.echo(f"source: {source}")
    click.echo(f"start: {model.start}")
    click.echo("")
    click.echo("gateways:")
    for gw in sorted(model.gateways, key=lambda g: g.id):
        click.echo(f"  {gw.id} ({gw.kind.value}): {gw.question}")
        for branch in gw.branches:
            click.echo(f"    {branch.label} ({branch.condition}) -> {branch.target}")
    click.echo("")
    click.echo("patterns:")
    for pat in sorted(model.patterns, key=lambda p: p.id):
        click.echo(f"  {pat.id}: {pat.name}")
        if pat.summary:
            click.echo(f"    {pat.summary}")
        if pat.improves():
            click.echo("    + " + ", ".join(pat.improves()))
        if pat.degrades():
            click.echo("    - " + ", ".join(pat.degrades()))
        for constraint in pat.constraints:
            click.echo(f"    ! {constraint}")
        if pat.complements:
            click.echo("    ~ complements: " + ", ".join(pat.complements))
        if pat.next is not None:
            click.echo(f"    next: {pat.next}")
        if pat.canonical is not None:
            click.echo(f"    canonical: {pat.canonical[0]}/{pat.canonical[1]}")
        if pat.refs:
            click.echo("    refs: " + ", ".join(pat.refs))


@main.command("advise")
@click.argument("area")
@click.option("--weight", "weight_flags", multiple=True, metavar="QA=VALUE")
@click.option("--answer", "answer_flags", multiple=True, metavar="GW=BRANCH[,BRANCH...]")
@click.option("--weights-file", default=None, metavar="FILE")
@click.option("--top", "k", type=click.IntRange(min=1), default=None)
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
@click.pass_obj
def cmd_advise(
    state: CliState,
    area: str,
    weight_flags: tuple[str, ...],
    answer_flags: tuple[str, ...],
    weights_file: str | None,
    k: int | None,
    fmt: str,
) -> None:
    """Rank the patterns activated by the given answers."""
    catalog = _load_catalog(state)
    model = _get_model(catalog, area)
    weights = _parse_weight_flags(weight_flags, weights_file)
    answers = _parse_answer_flags(answer_flags)
    try:
        vector = WeightVector.of(weights, catalog.vocabulary)
        recs = recommend(model, answers, vector, k)
    except QsaError as exc:
        raise CliError(f"{exc.code}: {exc.message}") from exc
    if fmt == "json":
        _echo_json({"recommendations": [recommendation_to_doc(r) for r in recs]})
    else:
        _render_recommendations(recs, state.use_color())
    if not weights:
        click.echo(
            "hint: no weights given, so every score is 0; set priorities "
            "with --weight QA=VALUE",
            err=True,
        )


def _prompt_gateway(gateway: Gateway, can_go_back: bool) -> object:
    """Ask one gateway question; returns chosen labels or the back marker."""
    click.echo(gateway.question)
    for index, branch in enumerate(gateway.branches, start=1):
        click.echo(f"  {index}) {branch.label} — {branch.condition}")
    if gateway.kind is GatewayKind.EXCLUSIVE:
        instruction = "choose exactly one (number or label)"
    else:
        instruction = "choose one or more, comma-separated (numbers or labels)"
    if can_go_back:
        instruction += ", or 'back'"
    while True:
        raw = click.prompt(instruction, type=str).strip()
        if raw.lower() == "back":
            if can_go_back:
                return _BACK
            click.echo("already at the first question")
            continue
        tokens = [token.strip() for token in raw.split(",") if token.strip()]
        labels: list[str] = []
        valid = bool(tokens)
        for token in tokens:
            if token.isdigit() and 1 <= int(token) <= len(gateway.branches):
                labels.append(gateway.branches[int(token) - 1].label)
            elif any(branch.label == token for branch in gateway.branches):
                labels.append(token)
            else:
                click.echo(f"no such option: {token}")
                valid = False
                break
        if not valid:
            continue
        unique = sorted(set(labels))
        if gateway.kind is GatewayKind.EXCLUSIVE and len(unique) != 1:
            click.echo("this question takes exactly one choice")
            continue
        return unique


def _prompt_weights(catalog: Catalog) -> dict[str, Decimal]:
    click.echo("")
    click.echo("Set priorities as QA=VALUE (e.g. security=2); blank line to finish.")
    weights: dict[str, Decimal] = {}
    while True:
        raw = click.prompt("weight", default="", show_default=False).strip()
        if not raw:
            return weights
        name, sep, value = raw.partition("=")
        if not sep:
            click.echo("use QA=VALUE form")
            continue
        resolved = catalog.vocabulary.resolve(name.strip())
        if resolved is None:
            click.echo(f"unknown quality attribute: {name.strip()}")
            continue
        try:
            parsed = Decimal(value.strip())
        except InvalidOperation:
            click.echo(f"not a number: {value.strip()}")
            continue
        if parsed < 0:
            click.echo("weights must be nonnegative")
            continue
        weights[resolved] = parsed


@main.command("interactive")
@click.argument("area")
@click.pass_obj
def cmd_interactive(state: CliState, area: str) -> None:
    """Guided wizard: answer questions, set weights, get a ranking."""
    catalog = _load_catalog(state)
    model = _get_model(catalog, area)
    color = state.use_color()
    try:
        click.echo(f"{model.meta.title}: guided pattern selection")
        click.echo("")
        answers: dict[str, tuple[str, ...]] = {}
        answered_order: list[str] = []
        while True:
            session = session_with(model, answers)
            if session.complete:
                break
            gateway = session.questions()[0]
            choice = _prompt_gateway(gateway, can_go_back=bool(answered_order))
            click.echo("")
            if choice is _BACK:
                previous = answered_order.pop()
                answers.pop(previous, None)
                continue
            answers[gateway.id] = tuple(choice)  # type: ignore[arg-type]
            # Re-answering upstream may discard activated subtrees; keep the
            # back-stack aligned with what actually remains answered.
            session = session_with(model, answers)
            answers = dict(session.answers)
            answered_order = [g for g in answered_order if g in answers]
            answered_order.append(gateway.id)
        weights = _prompt_weights(catalog)
        vector = WeightVector.of(weights, catalog.vocabulary)
        recs = recommend(model, answers, vector, None)
        click.echo("")
        _render_recommendations(recs, color)
    except (click.Abort, KeyboardInterrupt):
        click.echo("", err=True)
        click.echo("interrupted", err=True)
        sys.exit(130)


def _run_diagnostics(path: str, style: bool, fmt: str) -> int:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}") from exc
    if style:
        diagnostics = lint_document(data)
    else:
        diagnostics = parse_document(data).diagnostics
    if fmt == "json":
        _echo_json(
            {
                "ok": not any(d.is_error for d in diagnostics),
                "diagnostics": [
                    {
                        "severity": d.severity.value,
                        "code": d.code,
                        "message": d.message,
                        "line": d.span.line,
                        "col": d.span.col,
                    }
                    for d in diagnostics
                ],
            }
        )
    else:
        for diagnostic in diagnostics:
            click.echo(diagnostic.render())
    return 1 if any(d.is_error for d in diagnostics) else 0


@main.command("validate")
@click.argument("path")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
def cmd_validate(path: str, fmt: str) -> None:
    """Parse and validate a .qdm file; exit 1 when it has errors."""
    sys.exit(_run_diagnostics(path, style=False, fmt=fmt))


@main.command("lint")
@click.argument("path")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
def cmd_lint(path: str, fmt: str) -> None:
    """Validate plus style checks (canonical form, provenance, aliases)."""
    sys.exit(_run_diagnostics(path, style=True, fmt=fmt))


@main.command("export-dot")
@click.argument("area")
@click.pass_obj
def cmd_export_dot(state: CliState, area: str) -> None:
    """Write the area's graph as DOT on standard output."""
    catalog = _load_catalog(state)
    model = _get_model(catalog, area)
    click.echo(model_to_dot(model), nl=False)


@main.command("serve")
@click.option("--addr", default="127.0.0.1:8080", show_default=True, metavar="HOST:PORT")
@click.option(
    "--cors-origin",
    "cors_origins",
    multiple=True,
    metavar="ORIGIN",
    help="Origin allowed to POST cross-site; repeatable.",
)
@click.pass_obj
def cmd_serve(state: CliState, addr: str, cors_origins: tuple[str, ...]) -> None:
    """Serve the HTTP API over the loaded catalog."""
    import uvicorn

    from .service import create_app

    catalog = _load_catalog(state)
    host, sep, port_text = addr.rpartition(":")
    if not sep or not host:
        raise CliError(f"--addr must be HOST:PORT, got {addr!r}")
    try:
        port = int(port_text)
    except ValueError:
        raise CliError(f"--addr port is not a number: {port_text!r}") from None

    sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    try:
        sock.bind((host, port))
    except OSError as exc:
        sock.close()
        raise CliError(f"bind-failed: {addr}: {exc}") from exc

    handler = logging.StreamHandler(sys.stdout)
    handler.setFormatter(logging.Formatter("%(message)s"))
    service_log = logging.getLogger("qsa.service")
    service_log.addHandler(handler)
    service_log.setLevel(logging.INFO)

    app = create_app(catalog, tuple(cors_origins))
    click.echo(f"serving on http://{host}:{port}/v1")
    server = uvicorn.Server(
        uvicorn.Config(app, log_level="warning", access_log=False)
    )
    server.run(sockets=[sock])


if __name__ == "__main__":
    main()
