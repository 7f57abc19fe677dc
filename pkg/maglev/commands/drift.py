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
from maglev.core.plots import plot_comparison
from maglev.core.runner import MemberTask, run_members
from maglev.exceptions import ConfigError
from maglev.models import load_config

logger = logging.getLogger("maglev_sim")

DRIFT_COLUMNS = ("period", "status", "max_overshoot", "rise_time", "settling_time", "percent_overshoot")


@click.command("drift-sweep")
@common_options
@jobs_option
@reports_errors
def drift_sweep(config_path, out_dir, plots, band, quiet, jobs):
    """
    Re-run one controller with each drift period's parameter overrides applied
    (equilibrium and linearization re-derived per period) and tabulate the results.
    """
    config = load_config(config_path)
    if config.drift is None:
        raise ConfigError("drift-sweep needs a 'drift' section with at least one period")
    members = config.members()
    if len(members) != 1:
        raise ConfigError(f"drift-sweep needs exactly one controller, config lists {len(members)}")
    metrics = conventions(config, band)
    out = output_dir(config, out_dir)
    spec = members[0]

    tasks = []
    for period in config.drift.periods:
        plant = config.plant.with_overrides(period.overrides)
        tasks.append(MemberTask(period.label, config.scenario(spec, plant=plant), metrics.kwargs()))
    results = run_members(tasks, jobs)

    rows = []
    for n, (period, result) in enumerate(zip(config.drift.periods, results), start=1):
        sub = member_dir(out, n, period.label)
        write_trace_csv(result.trace, sub / "trace.csv")
        summary = result.summary(period=period.label, controller=member_label(spec), plant=config.plant.kind)
        summary.update({f"override.{k}": v for k, v in period.overrides.items()})
        write_metrics(summary, sub / "metrics.txt")
        row = {"period": period.label, "status": result.status}
        if result.metrics is not None:
            row.update(result.metrics.as_dict())
        rows.append(row)
    write_table(rows, DRIFT_COLUMNS, out, "drift")
    if want_plots(config, plots):
        plot_comparison([(r.label, r.trace) for r in results if r.ok], out / "drift.svg")
    logger.info(f"Drift sweep over {len(results)} periods done")
