"""
Command-line entry point.
"""
import asyncio
import json
import logging
import sys
from typing import List, Optional

from crossratio.cli.parser import parse_request
from crossratio.core.config import Settings, settings
from crossratio.core.engine import runner
from crossratio.core.errors import InputError
from crossratio.core.models import CommandRequest


def _report(reason: dict) -> None:
    sys.stderr.write(json.dumps(reason, sort_keys=True, default=str) + "\n")


def _log_level(request: CommandRequest) -> str:
    """``--log-level``, else ``log_level`` from ``--config``, else the default."""
    if request.log_level:
        return request.log_level
    if request.config_path:
        try:
            return Settings.from_file(request.config_path).log_level
        except InputError:
            # the runner reports the broken config file
            pass
    return settings.log_level


def main(argv: Optional[List[str]] = None) -> int:
    try:
        request = parse_request(argv)
    except InputError as e:
        _report(e.to_dict())
        return e.exit_code
    level = _log_level(request)
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    logging.getLogger().setLevel(level)
    result = asyncio.run(runner.run(request))
    sys.stdout.write(result.stdout)
    sys.stdout.flush()
    if result.reason is not None:
        _report(result.reason)
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
