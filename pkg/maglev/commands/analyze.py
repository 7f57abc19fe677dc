import logging

import click
import numpy as np

from maglev.commands.common import common_options, output_dir, reports_errors, want_plots
from maglev.controllers.pid import zn_pid_gains, zn_ultimate_gain
from maglev.core.analysis import force_current_curve, is_stable, locus_gains, root_locus
from maglev.core.artifacts import format_value, write_lines, write_table
from maglev.core.numcore import TransferFunction, format_complex
from maglev.core.plant import MaglevParams, equilibrium_current, linearized_gains, magnetic_force
from maglev.core.plots import plot_force_current, plot_root_locus
from maglev.core.scenario import LinearizedPlantSpec, NonlinearPlantSpec
from maglev.core.sim import plant_transfer_function
from maglev.exceptions import DomainError, NotTunableError
from maglev.models import load_config

logger = logging.getLogger("maglev_sim")


def _poly(p) -> str:
    return ",".join(format_value(float(c)) for c in p.descending())


def _poles(poles) -> str:
    return ",".join(format_complex(z) for z in poles)


def _ziegler_nichols(g: TransferFunction) -> list:
    """Tries the loop sign that makes the plant's low-frequency gain positive."""
    low_num = g.numerator.coefficients[np.flatnonzero(g.numerator.coefficients)]
    low_den = g.denominator.coefficients[np.flatnonzero(g.denominator.coefficients)]
    sign = -1 if len(low_num) and low_num[0] * low_den[0] < 0 else 1
    loop = TransferFunction(g.numerator.scale(sign), g.denominator)
    try:
        ku, tu = zn_ultimate_gain(loop)
    except NotTunableError as e:
        logger.info(f"Ziegler-Nichols not applicable: {e.detail}")
        return ["zn_tuning=not_tunable", f"zn_detail={e.detail}"]
    except DomainError as e:
        return ["zn_tuning=not_applicable", f"zn_detail={e.detail}"]
    gains = zn_pid_gains(ku, tu)
    return [
        "zn_tuning=ok",
        f"zn_output_sign={sign}",
        f"zn_Ku={format_value(ku)}",
        f"zn_Tu={format_value(tu)}",
        f"zn_Kp={format_value(gains.Kp)}",
        f"zn_Ki={format_value(gains.Ki)}",
        f"zn_Kd={format_value(gains.Kd)}",
    ]


@click.command("analyze")
@common_options
@reports_errors
def analyze(config_path, out_dir, plots, band, quiet):
    """Poles, stability verdict, root locus and force-current curve of the configured plant."""
    config = load_config(config_path)
    out = output_dir(config, out_dir)
    g = plant_transfer_function(config.plant)
    report = is_stable(g)

    lines = [
        f"plant={config.plant.kind}",
        f"numerator={_poly(g.numerator)}",
        f"denominator={_poly(g.denominator)}",
        f"poles={_poles(report.poles)}",
        f"zeros={_poles(g.zeros())}",
        f"verdict={report.verdict}",
        f"unstable_poles={_poles(report.unstable_poles)}",
    ]
    physical = isinstance(config.plant, (NonlinearPlantSpec, LinearizedPlantSpec))
    params = config.plant.resolve() if physical else MaglevParams()
    if physical:
        k = linearized_gains(params, params.z0)
        lines += [
            f"z_eq={format_value(params.z0)}",
            f"i_eq={format_value(equilibrium_current(params, params.z0))}",
            f"Ki={format_value(k.Ki)}",
            f"Kz={format_value(k.Kz)}",
        ]
    lines += _ziegler_nichols(g)
    write_lines(lines, out / "analysis.txt")
    logger.info(f"Plant is {report.verdict}; poles {_poles(report.poles)}")

    z_fixed = config.analysis.z_fixed or params.z0
    i, f = force_current_curve(params, z_fixed, np.linspace(0.0, config.analysis.i_max, config.analysis.points))
    write_table([{"i": a, "f": b} for a, b in zip(i, f)], ("i", "f"), out, "force_current")

    if want_plots(config, plots):
        locus = root_locus(g, locus_gains(g, config.analysis.locus_samples))
        plot_root_locus(locus, report.poles, g.zeros(), out / "root_locus.svg")
        i_eq = equilibrium_current(params, z_fixed)
        plot_force_current(i, f, z_fixed, out / "force_current.svg",
                           equilibrium=(i_eq, magnetic_force(i_eq, z_fixed, params)))
