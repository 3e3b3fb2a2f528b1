"""stratex CLI - parse, explain, simulate and validate strategy templates.

Exit codes: 0 success, 1 validation failure, 2 input, syntax or usage error.
"""

import asyncio
import json
import sys
from pathlib import Path
from typing import NoReturn, Optional

import click
import yaml

from . import __version__
from .annotator import annotate
from .engine import BoulwareAgent, EngineError, TemplateAgent, run_session
from .explainer import StrategyExplainer
from .parser import TemplateSyntaxError, parse_template
from .plugins import BACKENDS, PluginError, PluginRegistry, init_plugins
from .plugins.config import StratexConfig, load_config
from .realizer import (
    Audience,
    Explanation,
    MissingRole,
    RuleFileError,
    default_rules,
    load_rules_file,
)
from .scenario import Scenario, ScenarioError, load_scenario
from .template import StructureError, TemplateError, TemplateKind, pretty_print, template_to_dict
from .validation import ValidatedExplanation, ValidationExhausted, validate

EXIT_INVALID = 1
EXIT_INPUT = 2

FORMAT_OPTION = click.option(
    "--format",
    "fmt",
    type=click.Choice(["text", "json"]),
    default="text",
    show_default=True,
    help="Output format",
)


def _fail(message: str, code: int = EXIT_INPUT) -> NoReturn:
    click.echo(f"Error: {message}", err=True)
    sys.exit(code)


def _template_diagnostic(path: str, error: TemplateError) -> str:
    """`file:line:col: message` when the error carries a span."""
    if isinstance(error, TemplateSyntaxError):
        line, col = error.span
        return f"{path}:{line}:{col}: expected {error.expected}, found {error.found}"
    if isinstance(error, StructureError) and error.span:
        line, col = error.span
        return f"{path}:{line}:{col}: {error.message}"
    return f"{path}: {error}"


def _echo_json(data) -> None:
    click.echo(json.dumps(data, indent=2, ensure_ascii=False))


def _write_json(path: str, data) -> None:
    Path(path).write_text(json.dumps(data, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")


# --- Config Utilities ---


def _config(ctx: click.Context) -> StratexConfig:
    """Effective configuration; loaded once per invocation."""
    obj = ctx.ensure_object(dict)
    if "config" not in obj:
        path = obj.get("config_path")
        try:
            obj["config"] = load_config(Path(path) if path else None)
        except (OSError, ValueError, yaml.YAMLError) as e:
            _fail(f"Invalid configuration: {e}")
    return obj["config"]


def _read_source(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        _fail(f"Cannot read {path}: {e.strerror}")
    except UnicodeDecodeError as e:
        _fail(f"Cannot read {path}: not UTF-8 text (byte {e.start}: {e.reason})")


def _load_template(ctx: click.Context, path: str, u_fixed: Optional[float] = None):
    cfg = _config(ctx)
    source = _read_source(path)
    try:
        return parse_template(source, u_fixed=cfg.u_fixed if u_fixed is None else u_fixed)
    except TemplateError as e:
        _fail(_template_diagnostic(path, e))


# --- CLI Group ---


@click.group()
@click.version_option(version=__version__, prog_name="stratex")
@click.option(
    "--config",
    "-c",
    "config_path",
    type=click.Path(exists=True, dir_okay=False),
    help="Config file path",
)
@click.option("--debug", "-d", is_flag=True, help="Enable debug logging")
@click.pass_context
def cli(ctx: click.Context, config_path: Optional[str], debug: bool):
    """stratex - negotiation strategy templates, executed and explained."""
    ctx.ensure_object(dict)
    ctx.obj["config_path"] = config_path
    ctx.obj["debug"] = debug


# --- Commands ---


@cli.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--semantics", is_flag=True, help="Print the semantic annotation instead")
@FORMAT_OPTION
@click.pass_context
def parse(ctx: click.Context, file: str, semantics: bool, fmt: str):
    """Parse a template and print it in canonical form."""
    template = _load_template(ctx, file)
    if semantics:
        _echo_json(annotate(template).to_dict())
    elif fmt == "json":
        _echo_json(template_to_dict(template))
    else:
        click.echo(pretty_print(template), nl=False)


async def _run_explainer(
    source: str, audience: Audience, raw_config: dict, cfg: StratexConfig
) -> ValidatedExplanation:
    registry = PluginRegistry()
    await init_plugins(raw_config, registry=registry)
    try:
        rules = load_rules_file(cfg.rules_path) if cfg.rules_path else default_rules()
        explainer = StrategyExplainer(
            registry.refinement_backend(),
            rules=rules,
            registry=registry,
            u_fixed=cfg.u_fixed,
            max_rounds=cfg.max_rounds,
        )
        return await explainer.explain(source, audience)
    finally:
        await registry.stop_all()


@cli.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option(
    "--audience",
    type=click.Choice([a.value for a in Audience]),
    required=True,
    help="Who the explanation is for",
)
@click.option("--backend", type=click.Choice(BACKENDS), help="Refinement backend (default from config)")
@click.option("--report", type=click.Path(dir_okay=False), help="Write the validation report here")
@click.option("--out", type=click.Path(dir_okay=False), help="Write the explanation JSON here")
@FORMAT_OPTION
@click.pass_context
def explain(
    ctx: click.Context,
    file: str,
    audience: str,
    backend: Optional[str],
    report: Optional[str],
    out: Optional[str],
    fmt: str,
):
    """Explain a template in plain English."""
    cfg = _config(ctx)
    raw_config = dict(cfg.raw)
    raw_config["backend"] = backend or cfg.backend
    if ctx.obj.get("debug"):
        raw_config["logger"] = {**(raw_config.get("logger") or {}), "level": "debug"}

    source = _read_source(file)

    try:
        result = asyncio.run(_run_explainer(source, Audience(audience), raw_config, cfg))
    except TemplateError as e:
        _fail(_template_diagnostic(file, e))
    except ValidationExhausted as e:
        if report:
            _write_json(report, e.report.to_dict())
        for failure in e.report.failures():
            click.echo(f"  - {failure}", err=True)
        _fail("Explanation failed validation", EXIT_INVALID)
    except (RuleFileError, MissingRole) as e:
        _fail(f"Rule file: {e}")
    except (PluginError, OSError) as e:
        _fail(str(e))

    if report:
        _write_json(report, result.report.to_dict())
    if out:
        _write_json(out, result.to_dict())
    if fmt == "json":
        _echo_json(result.to_dict())
    else:
        click.echo(result.text)


def _agent_b(ctx: click.Context, spec: str, scenario: Scenario):
    if spec == "boulware":
        return BoulwareAgent(
            "B", scenario.domain, scenario.profile_b, scenario.boulware, scenario.schedule
        )
    if not spec.startswith("template:"):
        raise click.BadParameter("expected 'boulware' or 'template:<file>'", param_hint="--agent-b")
    path = spec[len("template:") :]
    if not Path(path).is_file():
        _fail(f"Template file not found: {path}")
    template = _load_template(ctx, path, u_fixed=scenario.u_fixed)
    if template.kind != TemplateKind.ACCEPTANCE:
        _fail(f"{path}: agent B needs an acceptance template")
    opponent = scenario.profile_a if scenario.opponent_estimate == "profile" else None
    return TemplateAgent(
        "B",
        scenario.domain,
        scenario.profile_b,
        template,
        schedule=scenario.schedule,
        boulware=scenario.boulware,
        opponent_profile=opponent,
    )


@cli.command()
@click.option("--scenario", "scenario_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--agent-b", default="boulware", show_default=True, help="'boulware' or 'template:<file>'")
@click.option("--deadline", type=click.IntRange(min=1), help="Rounds (default from scenario)")
@click.option("--seed", type=click.IntRange(min=0), help="Random seed (default from scenario, else 0)")
@click.option("--out", type=click.Path(dir_okay=False), help="Write the transcript (JSON lines) here")
@FORMAT_OPTION
@click.pass_context
def simulate(
    ctx: click.Context,
    scenario_path: str,
    agent_b: str,
    deadline: Optional[int],
    seed: Optional[int],
    out: Optional[str],
    fmt: str,
):
    """Run a seeded negotiation session."""
    cfg = _config(ctx)
    try:
        scenario = load_scenario(
            scenario_path, default_schedule=cfg.schedule, default_boulware=cfg.boulware
        )
    except ScenarioError as e:
        _fail(f"{scenario_path}: {e}")

    agent_a = TemplateAgent(
        "A",
        scenario.domain,
        scenario.profile_a,
        scenario.acceptance_a,
        scenario.bidding_a,
        schedule=scenario.schedule,
        boulware=scenario.boulware,
        opponent_profile=scenario.opponent_profile,
    )
    try:
        outcome = run_session(
            scenario.domain,
            agent_a,
            _agent_b(ctx, agent_b, scenario),
            deadline if deadline is not None else scenario.deadline,
            seed if seed is not None else scenario.seed,
        )
    except EngineError as e:
        _fail(str(e))

    transcript = outcome.transcript_lines()
    if out:
        Path(out).write_text(transcript, encoding="utf-8")

    if fmt == "json":
        data = outcome.to_dict()
        if not out:
            data["transcript"] = [e.to_dict(outcome.domain) for e in outcome.transcript]
        _echo_json(data)
        return

    if not out:
        click.echo(transcript, nl=False)
    if outcome.agreed:
        click.echo(
            f"Agreement in round {outcome.round} (t={outcome.t:g}), accepted by "
            f"{outcome.accepted_by}: U_A={outcome.utility_a:.4f}, U_B={outcome.utility_b:.4f}"
        )
    else:
        click.echo(f"No agreement after {len(outcome.transcript)} actions")


@cli.command("validate")
@click.argument("explanation", type=click.Path(exists=True, dir_okay=False))
@click.option("--against", type=click.Path(exists=True, dir_okay=False), required=True,
              help="Template the explanation was generated from")
@FORMAT_OPTION
@click.pass_context
def validate_cmd(ctx: click.Context, explanation: str, against: str, fmt: str):
    """Check a saved explanation (from `explain --out`) against its template."""
    try:
        data = json.loads(Path(explanation).read_text(encoding="utf-8"))
    except (OSError, ValueError) as e:
        _fail(f"Cannot read explanation {explanation}: {e}")

    u_fixed = (data.get("meta") or {}).get("u_fixed") if isinstance(data, dict) else None
    template = _load_template(ctx, against, u_fixed=u_fixed)
    try:
        expl = Explanation.from_dict(data, semrep=annotate(template))
    except (KeyError, TypeError, ValueError) as e:
        _fail(f"Malformed explanation {explanation}: {e}")
    if expl.template_name != template.name:
        _fail(f"Explanation is for template '{expl.template_name}', not '{template.name}'")

    report = validate(expl, template)
    if fmt == "json":
        _echo_json(report.to_dict())
    else:
        for failure in report.failures():
            click.echo(f"  - {failure}")
        click.echo("Explanation is valid" if report.valid else "Explanation is invalid")
    if not report.valid:
        sys.exit(EXIT_INVALID)


# --- Config Commands ---


@cli.group()
def config():
    """Configuration commands."""
    pass


def _mask_secrets(data: dict) -> dict:
    """Mask sensitive values in config dict."""
    secret_keys = {"api_key", "secret", "password", "token"}
    result = {}
    for k, v in data.items():
        if isinstance(v, dict):
            result[k] = _mask_secrets(v)
        elif k in secret_keys and isinstance(v, str) and len(v) > 4:
            result[k] = f"***{v[-4:]}"
        else:
            result[k] = v
    return result


@config.command("show")
@click.option("--reveal", is_flag=True, help="Show secrets unmasked")
@click.pass_context
def config_show(ctx: click.Context, reveal: bool):
    """Show the effective configuration file contents."""
    import yaml

    data = dict(_config(ctx).raw)
    if not reveal:
        data = _mask_secrets(data)
    if data:
        click.echo(yaml.dump(data, default_flow_style=False, sort_keys=False))
    else:
        click.echo("# No configuration loaded")
        click.echo("# Create ~/.stratex/stratex.yml or ./stratex.yml")


def main():
    """Entry point."""
    cli()


if __name__ == "__main__":
    main()
