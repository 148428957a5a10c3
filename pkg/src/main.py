"""
uqpe-match - Main command-line entry point.

Click group wiring the estimate, simulate and match commands, with logging
configured once for the whole process.
"""

import logging

import click

from .commands import estimate as estimate_commands
from .commands import match as match_commands
from .commands import simulate as simulate_commands
from .core.config import Config

logger = logging.getLogger(__name__)

LOG_LEVELS = ["DEBUG", "INFO", "WARNING", "ERROR"]


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(Config.VERSION, prog_name=Config.APP_NAME)
@click.option(
    "--log-level",
    type=click.Choice(LOG_LEVELS, case_sensitive=False),
    default=None,
    help="Logging level (default LOG_LEVEL or INFO)",
)
def cli(log_level: str | None) -> None:
    """Unconditional quantile partial effects by matching conditional quantiles."""
    level = (log_level or Config.LOG_LEVEL).upper()
    # stderr only: stdout carries results
    logging.basicConfig(
        level=getattr(logging, level, logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        force=True,
    )
    logger.debug(f"{Config.APP_NAME} {Config.VERSION} starting")


cli.add_command(estimate_commands.estimate_command)
cli.add_command(simulate_commands.simulate_command)
cli.add_command(match_commands.match_command)


if __name__ == "__main__":
    cli()
