"""
Command-line parser.
"""
import argparse
from typing import List, NoReturn, Optional

from crossratio.core.errors import InputError
from crossratio.core.models import CommandRequest

LOG_LEVELS = ["DEBUG", "INFO", "WARNING", "ERROR"]


class CommandLineParser(argparse.ArgumentParser):
    """ArgumentParser that reports usage errors as InputError instead of exiting."""

    def error(self, message: str) -> NoReturn:
        raise InputError(f"{self.prog}: {message}", {"usage": self.format_usage().strip()})


def _add_viewport(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--center", default="0,0.5", help="viewport center as 're,im'")
    parser.add_argument("--half-width", type=float, default=2.0, help="viewport half-width")
    parser.add_argument("--min-radius", type=float, default=None, help="omit smaller circles")


def build_parser() -> CommandLineParser:
    parser = CommandLineParser(
        prog="crossratio",
        description="Circle packings of closed surfaces by one circle, in cross-ratio coordinates",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", dest="config_path", help="JSON file of settings overrides")
    common.add_argument("--log-level", choices=LOG_LEVELS, help="logging level (stderr)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("patterns", parents=[common], help="census of side-pairing patterns")
    p.add_argument("--genus", type=int, required=True)
    p.add_argument("--out", help="write the patterns to this file")
    p.add_argument("--workers", type=int, default=None, help="worker processes for the search")

    p = sub.add_parser("admissible", parents=[common], help="classify a cross-ratio word")
    p.add_argument("--vector", required=True, help="comma-separated positive cross ratios")
    p.add_argument("--threshold", choices=["left", "right", "both"], help="report the extension threshold")
    p.add_argument("--eps", type=float, default=None, help="dead band (default: acceptance tolerance)")

    p = sub.add_parser("torus", parents=[common], help="solve and verify a torus point")
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--y", type=float, required=True)
    p.add_argument("--traces", action="store_true", help="report holonomy traces")
    p.add_argument("--develop", dest="depth", type=int, default=None, help="development depth")
    p.add_argument("--svg", help="render the development to this file")
    p.add_argument("--json", help="write the scene to this file")
    _add_viewport(p)

    p = sub.add_parser("solve", parents=[common], help="solve the dependent triple")
    p.add_argument("--pattern", required=True, help="pattern file")
    p.add_argument("--free", required=True, help="free values file")
    p.add_argument("--out", help="write the full parameter file here")

    p = sub.add_parser("verify", parents=[common], help="verify a parameter point")
    p.add_argument("--params", required=True)

    p = sub.add_parser("holonomy", parents=[common], help="compare holonomy traces of two points")
    p.add_argument("--params", required=True)
    p.add_argument("--compare", required=True)
    p.add_argument("--require-equal", action="store_true", help="exit 2 when traces differ")

    p = sub.add_parser("develop", parents=[common], help="develop a packing and render it")
    p.add_argument("--params", required=True)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--svg", required=True)
    p.add_argument("--json", help="write the scene to this file")
    _add_viewport(p)
    return parser


def parse_request(argv: Optional[List[str]] = None) -> CommandRequest:
    """
    Parse a command line into a CommandRequest.

    Raises:
        InputError: On unknown commands, missing or malformed options
    """
    args = vars(build_parser().parse_args(argv))
    command = args.pop("command")
    config_path = args.pop("config_path", None)
    log_level = args.pop("log_level", None)
    return CommandRequest(command=command, options=args, config_path=config_path, log_level=log_level)
