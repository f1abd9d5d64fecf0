"""
Command runner.

Each subcommand is a linear pipeline of async steps. The runner loads the steps
through the registry, passes one state dict from step to step, keeps an
execution log, writes the collected output files atomically and maps errors to
exit codes:

- 0: success
- 1: malformed input (``InputError``, schema failures, unexpected errors)
- 2: mathematical verdict or invariant failure
"""
import importlib
import logging
import time
from typing import Any, Callable, Dict, List, Optional

from pydantic import ValidationError

from crossratio.core.config import Settings, settings as default_settings
from crossratio.core.errors import CrossRatioError, InputError
from crossratio.core.models import CommandRequest, CommandResult, ExecutionLogEntry
from crossratio.core.registry import registry
from crossratio.db.file_store import store

logger = logging.getLogger(__name__)

PIPELINES_PATH = "crossratio.workflows.commands.PIPELINES"


def _load_pipelines() -> Dict[str, List[str]]:
    module_path, name = PIPELINES_PATH.rsplit(".", 1)
    return getattr(importlib.import_module(module_path), name)


class StepFailure(Exception):
    """An unexpected exception inside a step, wrapped with the step name."""

    def __init__(self, step: str, cause: Exception):
        super().__init__(f"Error executing step '{step}': {cause}")
        self.step = step
        self.cause = cause


class CommandRunner:
    """
    Runs command pipelines over a shared state dict.

    Steps are async functions ``state -> state``. Output files are staged in
    ``state["files"]`` and written only after every step succeeded.
    """

    def __init__(self, pipelines: Optional[Dict[str, List[str]]] = None):
        self._pipelines = pipelines

    @property
    def pipelines(self) -> Dict[str, List[str]]:
        if self._pipelines is None:
            self._pipelines = _load_pipelines()
        return self._pipelines

    async def execute_step(self, name: str, func: Callable, state: Dict[str, Any]) -> Dict[str, Any]:
        """
        Execute a single step.

        Raises:
            CrossRatioError: Passed through unchanged
            StepFailure: Wrapping any other exception
        """
        try:
            result = await func(state)
        except CrossRatioError:
            raise
        except ValidationError as e:
            raise InputError(f"Invalid input in step '{name}': {e}", {"step": name})
        except Exception as e:
            raise StepFailure(name, e) from e
        if isinstance(result, dict):
            state.update(result)
        return state

    def _settings(self, request: CommandRequest) -> Settings:
        if request.config_path:
            return Settings.from_file(request.config_path)
        return default_settings

    async def run(self, request: CommandRequest) -> CommandResult:
        """
        Run one command.

        Args:
            request: The parsed command line

        Returns:
            CommandResult with stdout text, exit code, reason and execution log
        """
        log: List[ExecutionLogEntry] = []
        state: Dict[str, Any] = {
            "command": request.command,
            "options": dict(request.options),
            "stdout": [],
            "files": {},
        }
        step = "setup"
        try:
            state["settings"] = self._settings(request)
            steps = self.pipelines.get(request.command)
            if steps is None:
                raise InputError(f"Unknown command '{request.command}'", {"command": request.command})
            try:
                resolved = registry.resolve_pipeline(steps)
            except ImportError as e:
                raise StepFailure(step, e) from e
            for step, func in resolved:
                state = await self.execute_step(step, func, state)
                log.append(
                    ExecutionLogEntry(step=step, timestamp=time.time(), summary=state.pop("summary", None))
                )
                logger.debug("step %s completed", step)
            for path, text in sorted(state["files"].items()):
                store.write_text(path, text)
                logger.info("wrote %s", path)
        except CrossRatioError as e:
            log.append(ExecutionLogEntry(step=step, status="error", timestamp=time.time(), summary=e.message))
            logger.info("command %s failed in %s: %s", request.command, step, e.message)
            return CommandResult(
                command=request.command,
                status="failed",
                exit_code=e.exit_code,
                stdout="".join(state["stdout"]),
                reason=e.to_dict(),
                log=log,
            )
        except StepFailure as e:
            log.append(ExecutionLogEntry(step=step, status="error", timestamp=time.time(), summary=str(e)))
            logger.error("%s", e)
            return CommandResult(
                command=request.command,
                status="failed",
                exit_code=1,
                stdout="".join(state["stdout"]),
                reason={"error": "internal", "message": str(e), "details": {"step": e.step}},
                log=log,
            )

        failure: Optional[CrossRatioError] = state.get("failure")
        if failure is not None:
            return CommandResult(
                command=request.command,
                status="failed",
                exit_code=failure.exit_code,
                stdout="".join(state["stdout"]),
                reason=failure.to_dict(),
                log=log,
            )
        return CommandResult(
            command=request.command,
            status="completed",
            exit_code=0,
            stdout="".join(state["stdout"]),
            log=log,
        )


# Global runner instance
runner = CommandRunner()
