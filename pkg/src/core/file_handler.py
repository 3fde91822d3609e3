"""Dataset folder scanning"""
from collections import Counter
from pathlib import Path
from typing import List, Tuple

from natsort import natsorted


class FileHandler:
    """
    Finds training images below a folder.

    Images are PNG or JPEG files at any depth. Hidden files and anything
    inside hidden folders (``.git``, ``.ipynb_checkpoints``) are skipped.
    The order is a natural sort of the lower-cased relative path, so it
    is the same on every machine and filesystem.
    """

    VALID_EXTENSIONS = ('.png', '.jpg', '.jpeg')

    @staticmethod
    def _is_hidden(path: Path, root: Path) -> bool:
        return any(part.startswith('.') for part in path.relative_to(root).parts)

    @classmethod
    def scan(cls, folder_path: str) -> List[Path]:
        """
        Image paths below a folder in dataset order.

        Raises:
            FileNotFoundError: If the folder does not exist
            NotADirectoryError: If the path is a file
        """
        root = Path(folder_path).resolve()
        if not root.exists():
            raise FileNotFoundError(f"Folder not found: {folder_path}")
        if not root.is_dir():
            raise NotADirectoryError(f"Not a directory: {folder_path}")

        images = [
            path for path in root.rglob('*')
            if path.suffix.lower() in cls.VALID_EXTENSIONS and path.is_file() and not cls._is_hidden(path, root)
        ]
        return natsorted(images, key=lambda path: path.relative_to(root).as_posix().lower())

    @classmethod
    def find_valid_files(cls, folder_path: str) -> List[str]:
        """Absolute image paths, as strings, in dataset order"""
        return [str(path) for path in cls.scan(folder_path)]

    @classmethod
    def validate_folder(cls, folder_path: str) -> Tuple[bool, str, int]:
        """
        Check that a folder can serve as a dataset.

        Returns:
            Tuple of (is_valid, message, image_count); the message breaks
            the count down by extension
        """
        try:
            images = cls.scan(folder_path)
        except (FileNotFoundError, NotADirectoryError) as e:
            return False, str(e), 0

        if not images:
            return False, "No PNG/JPEG images found in folder", 0

        by_type = Counter(path.suffix.lower().lstrip('.') for path in images)
        detail = ", ".join(f"{count} {ext}" for ext, count in sorted(by_type.items()))
        return True, f"Found {len(images)} image(s) ({detail})", len(images)
