import logging

import click

from maglev.commands.common import (
    common_options,
    conventions,
    member_label,
    output_dir,
    reports_errors,
    want_plots,
)
from maglev.core.artifacts import write_metrics, write_trace_csv
from maglev.core.plots import plot_response
from maglev.core.runner import MemberTask, run_member
from maglev.exceptions import ConfigError
from maglev.models import load_config

logger = logging.getLogger("maglev_sim")


@click.command("run")
@common_options
@reports_errors
def run(config_path, out_dir, plots, band, quiet):
    """Simulate one scenario: trace.csv, metrics.txt and optionally response.svg."""
    config = load_config(config_path)
    members = config.members()
    if len(members) != 1:
        raise ConfigError(f"run needs exactly one controller, config lists {len(members)}")
    metrics = conventions(config, band)
    out = output_dir(config, out_dir)

    spec = members[0]
    label = member_label(spec)
    logger.info(f"Run '{label}' -> {out}")
    result = run_member(MemberTask(label, config.scenario(spec), metrics.kwargs()))

    write_trace_csv(result.trace, out / "trace.csv")
    write_metrics(result.summary(controller=label, plant=config.plant.kind), out / "metrics.txt")
    if want_plots(config, plots) and len(result.trace) > 0:
        plot_response(result.trace, out / "response.svg", title=label)

    if not result.ok:
        raise result.failure()
    logger.info(f"Run '{label}' finished: {len(result.trace)} samples")
