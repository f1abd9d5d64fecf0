"""
Resolution of pipeline step paths.

A pipeline is a list of dotted paths such as
``crossratio.workflows.commands.solve_triple``. The registry imports each path
once and checks that it names an async ``state -> state`` function.
"""
import importlib
import inspect
from typing import Awaitable, Callable, Dict, Iterable, List, Tuple

Step = Callable[[dict], Awaitable[dict]]


def step_name(path: str) -> str:
    """The short name of a step: the last component of its dotted path."""
    return path.rsplit(".", 1)[-1]


class StepRegistry:
    """Cache of resolved pipeline steps, keyed by dotted path."""

    def __init__(self):
        self._steps: Dict[str, Step] = {}

    def resolve(self, path: str) -> Step:
        """
        Import the step at ``path``.

        Raises:
            ImportError: If the module or attribute is missing, or the
                attribute is not an async function
        """
        if path in self._steps:
            return self._steps[path]
        module_path, _, attr = path.rpartition(".")
        if not module_path:
            raise ImportError(f"Step path '{path}' is not a dotted path")
        try:
            func = getattr(importlib.import_module(module_path), attr)
        except (ImportError, AttributeError) as e:
            raise ImportError(f"Failed to load step from path '{path}': {e}") from e
        if not inspect.iscoroutinefunction(func):
            raise ImportError(f"Step '{path}' must be an async function")
        self._steps[path] = func
        return func

    def resolve_pipeline(self, paths: Iterable[str]) -> List[Tuple[str, Step]]:
        """Resolve every step of a pipeline up front, as ``(name, step)`` pairs."""
        return [(step_name(path), self.resolve(path)) for path in paths]

    def resolved(self) -> List[str]:
        return sorted(self._steps)


# Global registry instance
registry = StepRegistry()
