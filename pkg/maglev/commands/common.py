import functools
import logging
import sys
from pathlib import Path
from typing import Optional

import click
from pydantic import ValidationError

from maglev.core.settings import get_settings
from maglev.exceptions import ConfigError, MaglevError
from maglev.logging_config import setup_logging
from maglev.logging_helper import save_error
from maglev.models import MetricConventions, RunConfig

logger = logging.getLogger("maglev_sim")


def error_line(kind: str, code: int, detail: str) -> str:
    detail = " ".join(str(detail).split()).replace('"', '\\"')
    return f'maglev: error={kind} exit={code} detail="{detail}"'


def common_options(func):
    """--config/--out/--plots/--band/--quiet, shared by every verb."""
    options = [
        click.option("--config", "config_path", required=True, type=click.Path(dir_okay=False),
                     help="YAML run configuration."),
        click.option("--out", "out_dir", type=click.Path(file_okay=False), default=None,
                     help="Output directory (overrides outputs.directory)."),
        click.option("--plots/--no-plots", default=None, help="Write SVG figures."),
        click.option("--band", type=float, default=None, help="Settling band in percent."),
        click.option("--quiet", is_flag=True, default=False, help="Only warnings and errors on stderr."),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def jobs_option(func):
    return click.option("--jobs", type=click.IntRange(min=1), default=1, show_default=True,
                        help="Worker processes for member runs.")(func)


def reports_errors(func):
    """
    Runs a command body, turning MaglevError into one stderr line and its exit code.
    Anything else is saved with its traceback and exits 1.
    """
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        setup_logging(quiet=kwargs.get("quiet", False))
        try:
            return func(*args, **kwargs)
        except MaglevError as e:
            click.echo(error_line(e.kind, e.exit_code, e.detail), err=True)
            sys.exit(e.exit_code)
        except Exception as e:
            ctx = click.get_current_context(silent=True)
            logger.error(f"Unexpected error: {save_error(e, ctx.info_name if ctx else None)}")
            click.echo(error_line("internal", 1, str(e)), err=True)
            sys.exit(1)
    return wrapper


def conventions(config: RunConfig, band: Optional[float]) -> MetricConventions:
    if band is None:
        return config.metrics
    try:
        return MetricConventions(**{**config.metrics.model_dump(), "band_pct": band})
    except ValidationError as e:
        raise ConfigError(f"--band: {e.errors()[0]['msg']}") from e


def output_dir(config: RunConfig, out_dir: Optional[str]) -> Path:
    return Path(out_dir or config.outputs.directory or get_settings().out_dir)


def want_plots(config: RunConfig, plots: Optional[bool]) -> bool:
    return config.outputs.plots if plots is None else plots


def member_label(spec) -> str:
    return spec.name or spec.kind
