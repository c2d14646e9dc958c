"""plots <kind> --in <csv> [--in <csv> ...] --out <img>

Thin shell over figures.render: one subcommand per figure kind, shared
options, exit 1 with a one-line error for anything the readers reject.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from lpp_plots.figures import KINDS, FigureSpec, render
from lpp_plots.tables import ConsistencyError, SchemaError


@click.group(name="plots")
def cli() -> None:
    """Render figures from the simulation CLI's CSV outputs."""


def _kind_command(kind: str, help_text: str):
    @cli.command(name=kind, help=help_text)
    @click.option("--in", "inputs", type=click.Path(path_type=Path), multiple=True,
                  required=True, help="Input CSV; repeat to overlay several.")
    @click.option("--out", "out", type=click.Path(path_type=Path), required=True,
                  help="Output image; format follows the suffix (.png/.svg/.pdf).")
    @click.option("--dpi", type=int, default=150, show_default=True)
    @click.option("--title", default=None)
    @click.option("--logy/--linear-y", "logy", default=None,
                  help="Override the kind's default y scale.")
    def _cmd(inputs: tuple[Path, ...], out: Path, dpi: int, title: str | None,
             logy: bool | None) -> None:
        spec = FigureSpec(inputs=inputs, kind=kind, out=out, dpi=dpi,
                          title=title, logy=logy)
        render(spec)
        click.echo(f"wrote {out}")

    return _cmd


_kind_command("covariance", "Second moments against tau with stderr bands.")
_kind_command("localization", "Touch probabilities with the recomputed decay fit.")
_kind_command("tails", "Empirical tails beside their stated bound curves.")
_kind_command("kernel", "Quadrature distribution line with optional point overlays.")
_kind_command("geodesic", "Path traces relative to the diagonal.")

assert set(KINDS) == {c for c in cli.commands}, "figure kinds and subcommands diverged"


def main(argv: list[str] | None = None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.exceptions.Abort:
        return 1
    except click.exceptions.ClickException as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        return 1
    except (SchemaError, ConsistencyError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 1


if __name__ == "__main__":
    sys.exit(main())
