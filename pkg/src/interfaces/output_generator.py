"""Run artifact writer interface"""
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Generic, TypeVar

T = TypeVar("T")


class OutputGenerator(ABC, Generic[T]):
    """
    Writes one kind of run artifact (metric table, image grid).

    Subclasses declare the payload type they accept and the file
    extension they produce; ``prepare_path`` gives them a checked
    destination with its parent folder created.
    """

    extension: str = ""

    def prepare_path(self, output_path: str) -> Path:
        """
        Destination for an artifact, parent folders created.

        Raises:
            ValueError: If the path has the wrong extension
        """
        path = Path(output_path)
        if self.extension and path.suffix.lower() != self.extension:
            raise ValueError(f"{self.get_format_name()} output must end in {self.extension}: {output_path}")
        path.parent.mkdir(parents=True, exist_ok=True)
        return path

    @abstractmethod
    def generate(self, content: T, output_path: str) -> bool:
        """
        Write ``content`` to ``output_path``, replacing any existing file.

        Returns:
            True if successful

        Raises:
            OSError: If the file cannot be written
        """

    @abstractmethod
    def get_format_name(self) -> str:
        """Short format name for log lines, e.g. "CSV" """
