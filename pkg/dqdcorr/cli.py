"""Command-line interface for dqdcorr."""

import logging
import sys
from pathlib import Path
from typing import Literal

import click
from pydantic import BaseModel, ConfigDict, ValidationError, model_validator

from dqdcorr.engine.config import Settings, load_settings, resolve_workers
from dqdcorr.engine.correlations import INCOHERENT_THETA, THETA_MAX
from dqdcorr.engine.errors import EXIT_IO, EXIT_USAGE, DqdcorrError, OutputError
from dqdcorr.engine.model import ModelParams
from dqdcorr.engine.scan import (
    FIGURES,
    SweepSpec,
    evaluate_point,
    figure_dataset,
    figure_specs,
    run_sweep,
    threshold_temperature,
)
from dqdcorr.engine.validation import run_validation
from dqdcorr.output import (
    STDOUT,
    check_writable,
    point_record,
    render_record,
    render_sweep,
    write_output,
)
from dqdcorr.version import __version__

logger = logging.getLogger(__name__)

FORMATS = click.Choice(["csv", "json"])
SWEEP_AXES = {"temperature": None, "coulomb": "v", "delta1": "d1", "delta2": "d2"}


class RunConfig(BaseModel):
    """Validated inputs of one point, sweep or threshold invocation."""

    model_config = ConfigDict(frozen=True)

    command: Literal["point", "sweep", "threshold"]
    params: ModelParams
    temperature: float | None = None
    theta: float = INCOHERENT_THETA
    output: str = STDOUT
    fmt: Literal["csv", "json"] = "csv"

    @model_validator(mode="after")
    def _check(self) -> "RunConfig":
        if self.command == "point" and self.temperature is None:
            raise ValueError("point needs a temperature")
        if not (0.0 <= self.theta <= THETA_MAX):
            raise ValueError(f"theta must lie in [0, pi/2], got {self.theta}")
        return self

    def check_output(self) -> None:
        """Raise ``OutputError`` now rather than after the computation."""
        check_writable(self.output)


class DqdcorrGroup(click.Group):
    """Click group that turns every failure into the documented exit code."""

    def main(self, *args, **kwargs):
        kwargs["standalone_mode"] = False
        try:
            return super().main(*args, **kwargs)
        except click.ClickException as e:
            e.show()
            raise SystemExit(EXIT_USAGE)
        except click.Abort:
            click.echo("Aborted!", err=True)
            raise SystemExit(EXIT_USAGE)
        except ValidationError as e:
            click.echo(f"Error: invalid input: {_first_error(e)}", err=True)
            raise SystemExit(EXIT_USAGE)
        except DqdcorrError as e:
            click.echo(f"Error: {e}", err=True)
            raise SystemExit(e.exit_code)
        except OSError as e:
            click.echo(f"Error: {e}", err=True)
            raise SystemExit(EXIT_IO)


def _first_error(e: ValidationError) -> str:
    err = e.errors()[0]
    location = ".".join(str(part) for part in err["loc"])
    return f"{location}: {err['msg']}" if location else err["msg"]


def _settings(ctx: click.Context) -> Settings:
    return ctx.obj["settings"]


def _params(d1: float, d2: float, v: float) -> ModelParams:
    return ModelParams(delta1=d1, delta2=d2, v=v)


def model_options(fn):
    fn = click.option("--v", "v", type=float, help="Coulomb coupling V")(fn)
    fn = click.option("--d2", "d2", type=float, help="Tunneling of DQD 2 (Delta2)")(fn)
    fn = click.option("--d1", "d1", type=float, help="Tunneling of DQD 1 (Delta1)")(fn)
    return fn


def output_options(fn):
    fn = click.option(
        "--output", "output", default=STDOUT, show_default=True, help="Output file, '-' for stdout"
    )(fn)
    fn = click.option("--format", "fmt", type=FORMATS, default="csv", show_default=True)(fn)
    return fn


def _require(**values: float | None) -> None:
    missing = [f"--{name}" for name, value in values.items() if value is None]
    if missing:
        raise click.UsageError(f"Missing option(s): {', '.join(missing)}")


@click.group(cls=DqdcorrGroup)
@click.version_option(version=__version__, prog_name="dqdcorr")
@click.option(
    "--config",
    "config_path",
    type=click.Path(dir_okay=False),
    default=None,
    help="Settings file (default: ./dqdcorr.yaml if present)",
)
@click.option(
    "--log-level",
    type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"], case_sensitive=False),
    default=None,
    help="Log level (default from settings, WARNING)",
)
@click.pass_context
def cli(ctx: click.Context, config_path: str | None, log_level: str | None):
    """dqdcorr - thermal entanglement and correlated coherence of coupled double quantum dots.

    Basis order is (LL, LR, RL, RR); energies in units of the couplings, k_B = 1.
    """
    settings = load_settings(config_path)
    logging.basicConfig(
        level=(log_level or settings.log_level).upper(),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )
    ctx.obj = {"settings": settings}


@cli.command()
@model_options
@click.option("--t", "t", type=float, required=True, help="Temperature; 0 and inf are accepted")
@click.option("--theta", type=float, default=INCOHERENT_THETA, help="Local basis angle (radians)")
@output_options
def point(d1, d2, v, t, theta, fmt, output):
    """Evaluate every quantity at a single (Delta1, Delta2, V, T)."""
    _require(d1=d1, d2=d2, v=v)
    config = RunConfig(
        command="point",
        params=_params(d1, d2, v),
        temperature=t,
        theta=theta,
        output=output,
        fmt=fmt,
    )
    config.check_output()
    report = evaluate_point(config.params, t, config.theta)
    write_output(render_record(point_record(report), config.fmt), config.output)


@cli.command()
@click.option("--axis", type=click.Choice(list(SWEEP_AXES)), required=True)
@click.option("--from", "start", type=float, required=True, help="First axis value")
@click.option("--to", "stop", type=float, required=True, help="Last axis value")
@click.option("--points", type=int, default=None, help="Grid size (default from settings, 400)")
@click.option("--log-scale", is_flag=True, help="Logarithmic axis spacing")
@model_options
@click.option("--t", "t", type=float, default=None, help="Fixed temperature (non-temperature axes)")
@click.option("--theta", type=float, default=INCOHERENT_THETA, help="Local basis angle (radians)")
@output_options
@click.option("--workers", type=int, default=None, help="Worker processes")
@click.pass_context
def sweep(ctx, axis, start, stop, points, log_scale, d1, d2, v, t, theta, fmt, output, workers):
    """Sweep one axis and emit concurrence and coherence per grid point."""
    settings = _settings(ctx)
    given = {"d1": d1, "d2": d2, "v": v}
    swept = SWEEP_AXES[axis]
    if swept is not None and given[swept] is None:
        given[swept] = 0.0
    _require(**given)
    config = RunConfig(
        command="sweep",
        params=_params(given["d1"], given["d2"], given["v"]),
        temperature=t,
        theta=theta,
        output=output,
        fmt=fmt,
    )
    config.check_output()

    spec = SweepSpec(
        axis=axis,
        start=start,
        stop=stop,
        points=settings.sweep_points if points is None else points,
        params=config.params,
        temperature=config.temperature,
        theta=config.theta,
        log_scale=log_scale,
    )
    result = run_sweep(spec, resolve_workers(workers, settings))
    write_output(render_sweep(result, config.fmt), config.output)


@cli.command()
@model_options
@click.option("--t-lo", type=float, default=0.0, show_default=True)
@click.option("--t-hi", type=float, default=None, help="Upper bracket (default: automatic)")
@click.option("--tol", type=float, default=None, help="Bisection tolerance (default 1e-4)")
@output_options
@click.pass_context
def threshold(ctx, d1, d2, v, t_lo, t_hi, tol, fmt, output):
    """Find the temperature above which the concurrence vanishes."""
    _require(d1=d1, d2=d2, v=v)
    config = RunConfig(command="threshold", params=_params(d1, d2, v), output=output, fmt=fmt)
    config.check_output()
    tol = tol if tol is not None else _settings(ctx).threshold_tol
    t_star = threshold_temperature(config.params, t_lo=t_lo, t_hi=t_hi, tol=tol)
    record = {
        "d1": d1,
        "d2": d2,
        "v": v,
        "t_lo": t_lo,
        "t_hi": "auto" if t_hi is None else t_hi,
        "tol": tol,
        "t_star": t_star,
    }
    write_output(render_record(record, config.fmt), config.output)


@cli.command()
@click.argument("figure_id", type=click.Choice(list(FIGURES)))
@click.option("--output-dir", type=click.Path(file_okay=False), default=".", show_default=True)
@click.option("--points", type=int, default=None, help="Grid size (default from settings, 400)")
@click.option("--format", "fmt", type=FORMATS, default="csv", show_default=True)
@click.option("--workers", type=int, default=None, help="Worker processes")
@click.pass_context
def figure(ctx, figure_id, output_dir, points, fmt, workers):
    """Write one file per curve of FIGURE_ID, named <figure_id>_<curve>.<format>."""
    settings = _settings(ctx)
    points = settings.sweep_points if points is None else points
    out_dir = Path(output_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise OutputError(str(out_dir), e.strerror or str(e)) from e

    specs = figure_specs(figure_id, points)
    paths = [out_dir / f"{figure_id}_{spec.label}.{fmt}" for spec in specs]
    for path in paths:
        check_writable(path)

    results = figure_dataset(figure_id, points, resolve_workers(workers, settings))
    for path, result in zip(paths, results):
        write_output(render_sweep(result, fmt), path)
        click.echo(f"Wrote {path}")


@cli.command()
@click.option("--seed", type=int, default=None, help="Grid seed (default from settings, 0)")
@click.option(
    "--grid", type=click.Choice(["default", "coarse", "full"]), default="default", show_default=True
)
@click.option("--points", type=int, default=None, help="Number of grid points")
@click.option("--workers", type=int, default=None, help="Worker processes")
@click.pass_context
def validate(ctx, seed, grid, points, workers):
    """Compare every closed-form result with its numerical oracle.

    Exits with status 2 when a category exceeds its tolerance.
    """
    settings = _settings(ctx)
    seed = settings.validation_seed if seed is None else seed
    if points is None and grid == "default":
        points = settings.validation_points
    report = run_validation(grid, seed, points, resolve_workers(workers, settings))
    click.echo(report.to_text(), nl=False)
    report.check()


def main():
    """Entry point for the CLI."""
    cli()


if __name__ == "__main__":
    main()
