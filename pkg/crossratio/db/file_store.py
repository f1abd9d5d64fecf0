"""
File storage for command inputs and outputs.
"""
import json
import os
from pathlib import Path
from typing import Any, Union

from crossratio.core.errors import InputError

PathLike = Union[str, Path]


def dump_json(data: Any) -> str:
    """Deterministic JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


class FileStore:
    """
    Reads JSON inputs and writes outputs atomically.

    Writes go to a sibling ``.tmp`` file, are flushed and fsynced, then renamed
    over the target, so a failed command never leaves a partial file.
    """

    def read_text(self, path: PathLike) -> str:
        """
        Read a text file.

        Raises:
            InputError: If the file cannot be read
        """
        try:
            return Path(path).read_text(encoding="utf-8")
        except OSError as e:
            raise InputError(f"Cannot read '{path}': {e}", {"path": str(path)})

    def read_json(self, path: PathLike) -> Any:
        """
        Parse a JSON file.

        Raises:
            InputError: If the file cannot be read or is not valid JSON
        """
        text = self.read_text(path)
        try:
            return json.loads(text)
        except json.JSONDecodeError as e:
            raise InputError(f"'{path}' is not valid JSON: {e}", {"path": str(path)})

    def write_text(self, path: PathLike, text: str) -> Path:
        target = Path(path)
        tmp = target.with_suffix(target.suffix + ".tmp")
        try:
            with open(tmp, "w", encoding="utf-8", newline="\n") as f:
                f.write(text)
                f.flush()
                os.fsync(f.fileno())
            os.replace(tmp, target)
        except OSError as e:
            if tmp.exists():
                tmp.unlink()
            raise InputError(f"Cannot write '{path}': {e}", {"path": str(path)})
        return target

    def write_json(self, path: PathLike, data: Any) -> Path:
        return self.write_text(path, dump_json(data))


# Global store instance
store = FileStore()
