"""Base repository with common file operations."""
import os
import tempfile
from pathlib import Path
from typing import Union

from mortcast.exceptions import IoError, MissingData
from mortcast.logging_config import get_logger

logger = get_logger(__name__)

PathLike = Union[str, Path]


class FileRepository:
    """Base repository for text artifacts under one root directory.

    All repositories should inherit from this class. Writes go through a
    temporary file in the target directory and are renamed into place, so
    readers never see a half-written file.
    """

    def __init__(self, root: PathLike):
        """Initialize repository.

        Args:
            root: Directory holding the repository's files
        """
        self.root = Path(root)

    def path(self, name: str) -> Path:
        """Absolute location of `name` inside the root."""
        return self.root / name

    def exists(self, name: str) -> bool:
        return self.path(name).is_file()

    def read_text(self, name: str) -> str:
        """Read a file.

        Raises:
            MissingData: File does not exist
            IoError: File exists but cannot be read
        """
        path = self.path(name)
        if not path.is_file():
            raise MissingData([f"Missing file: {path}"])
        try:
            return path.read_text(encoding="utf-8")
        except OSError as exc:
            raise IoError([f"Cannot read {path}: {exc}"]) from exc

    def write_text(self, name: str, text: str) -> Path:
        """Write a file atomically, creating directories as needed.

        Raises:
            IoError: Directory or file cannot be written
        """
        path = self.path(name)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
            with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
                handle.write(text)
            os.replace(tmp, path)
        except OSError as exc:
            raise IoError([f"Cannot write {path}: {exc}"]) from exc
        logger.debug(f"Wrote {path}")
        return path

    def list(self, pattern: str = "*") -> list[Path]:
        """Files under the root matching `pattern`, sorted by name."""
        if not self.root.is_dir():
            return []
        return sorted(p for p in self.root.glob(pattern) if p.is_file())
