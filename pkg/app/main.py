"""
Command-line entry point for wavelet-subband CycleGAN denoising
"""
import argparse
import sys
from typing import Optional, Sequence

from pydantic import ValidationError

from app.commands import COMMANDS
from app.core.config import Settings, get_settings
from app.core.errors import WavCycleError
from app.core.logging import configure_logging, get_logger

logger = get_logger(__name__)


class _ArgumentParser(argparse.ArgumentParser):
    """argparse parser whose usage errors carry the stable `usage` category"""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(2, f"error usage {message}\n")


def create_parser() -> argparse.ArgumentParser:
    """
    Build the CLI parser with one subparser per command

    Returns:
        Configured parser
    """
    settings = get_settings()
    parser = _ArgumentParser(
        prog=settings.app_name,
        description="Unsupervised wavelet-subband CycleGAN denoising for multi-band rasters",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {settings.app_version}")
    parser.add_argument("--seed", type=int, default=None, help="Seed for every stochastic output")
    parser.add_argument("--threads", type=int, default=None, help="Internal parallelism degree")
    parser.add_argument("--verbose", action="store_true", help="Debug logging")

    subparsers = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)
    for command in COMMANDS:
        command.register(subparsers)
    return parser


def resolve_settings(args: argparse.Namespace) -> Settings:
    """Environment settings with the global flags applied"""
    update: dict = {}
    if args.seed is not None:
        update["seed"] = args.seed
    if args.threads is not None:
        update["threads"] = args.threads
    if args.verbose:
        update["log_level"] = "DEBUG"
    return Settings(**{**get_settings().model_dump(), **update})


def _fail(category: str, message: str, code: int) -> int:
    print(f"error {category} {message}", file=sys.stderr)
    return code


def run(argv: Optional[Sequence[str]] = None) -> int:
    """
    Parse arguments, run one command and map failures to exit codes

    Exit codes: 0 success, 1 internal error, 2 usage/input/format error,
    3 numeric divergence. Failures print one `error <category> <message>`
    line on stderr.

    Args:
        argv: Arguments without the program name (defaults to sys.argv[1:])

    Returns:
        Process exit code
    """
    parser = create_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    try:
        settings = resolve_settings(args)
    except ValidationError as e:
        return _fail("config.invalid", str(e.errors()[0]["msg"]), 2)
    configure_logging(settings.log_level, settings.log_format)
    logger.info(
        "config_resolved",
        command=args.command,
        seed=settings.seed,
        threads=settings.threads,
        serial=settings.serial,
        device=settings.device,
        arguments={key: str(value) for key, value in vars(args).items() if key != "handler"},
    )

    try:
        return args.handler(args, settings)
    except WavCycleError as e:
        logger.debug("command_failed", category=e.category, exc_info=True)
        return _fail(e.category, str(e), e.exit_code)
    except FileNotFoundError as e:
        return _fail("io.not_found", str(e), 2)
    except ValidationError as e:
        first = e.errors()[0]
        location = ".".join(str(part) for part in first["loc"])
        return _fail("config.invalid", f"{location}: {first['msg']}" if location else first["msg"], 2)
    except Exception as e:
        logger.error("command_crashed", error=str(e), exc_info=True)
        return _fail("internal", f"{type(e).__name__}: {e}", 1)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
