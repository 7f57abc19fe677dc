import logging

import click

from maglev.commands.common import (
    common_options,
    conventions,
    jobs_option,
    member_label,
    output_dir,
    reports_errors,
    want_plots,
)
from maglev.core.artifacts import member_dir, write_metrics, write_table, write_trace_csv
from maglev.core.plots import plot_comparison, plot_response
from maglev.core.runner import MemberTask, run_members
from maglev.exceptions import ConfigError, SimulationFailure
from maglev.models import load_config

logger = logging.getLogger("maglev_sim")

COMPARISON_COLUMNS = ("controller", "status", "rise_time", "settling_time", "percent_overshoot", "steady_state_value")


@click.command("compare")
@common_options
@jobs_option
@reports_errors
def compare(config_path, out_dir, plots, band, quiet, jobs):
    """Run every listed controller on the shared plant and tabulate their step metrics."""
    config = load_config(config_path)
    members = config.members()
    if len(members) < 2:
        raise ConfigError(f"compare needs at least 2 controllers, config lists {len(members)}")
    metrics = conventions(config, band)
    out = output_dir(config, out_dir)
    plotting = want_plots(config, plots)

    tasks = [MemberTask(member_label(s), config.scenario(s), metrics.kwargs()) for s in members]
    results = run_members(tasks, jobs)

    rows = []
    for n, result in enumerate(results, start=1):
        sub = member_dir(out, n, result.label)
        write_trace_csv(result.trace, sub / "trace.csv")
        write_metrics(result.summary(controller=result.label, plant=config.plant.kind), sub / "metrics.txt")
        if plotting and len(result.trace) > 0:
            plot_response(result.trace, sub / "response.svg", title=result.label)
        row = {"controller": result.label, "status": result.status}
        if result.metrics is not None:
            row.update(result.metrics.as_dict())
        rows.append(row)
    write_table(rows, COMPARISON_COLUMNS, out, "comparison")
    if plotting:
        plot_comparison([(r.label, r.trace) for r in results if r.ok], out / "comparison.svg")

    failed = [r for r in results if not r.ok]
    for r in failed:
        logger.warning(f"Controller '{r.label}' failed: {r.status}")
    if len(failed) == len(results):
        raise SimulationFailure("all_failed", f"all {len(results)} controllers failed", results[0].failure_time or 0.0)
    logger.info(f"Compared {len(results)} controllers, {len(failed)} failed")
