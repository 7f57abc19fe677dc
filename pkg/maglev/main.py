import click

from maglev.commands import analyze, compare, drift, run

@click.group(
    help="EMS maglev toolkit: closed-loop simulation, controller comparison, drift sweeps and plant analysis.",
    context_settings={"help_option_names": ["-h", "--help"]},
)
@click.version_option("1.0.0", prog_name="maglev")
def cli():
    pass

cli.add_command(run.run)
cli.add_command(compare.compare)
cli.add_command(drift.drift_sweep)
cli.add_command(analyze.analyze)
