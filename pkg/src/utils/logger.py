"""Logging for HP-GAN: one console stream plus per-run log files"""
import logging
import sys
from pathlib import Path
from typing import Dict, Optional

CONSOLE_FORMAT = '%(levelname)s - %(message)s'
FILE_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
DATE_FORMAT = '%Y-%m-%d %H:%M:%S'


def _level(name: str) -> int:
    return getattr(logging, name.upper(), logging.INFO)


class Logger:
    """
    Process-wide logger for the harness.

    The first call configures the console handler (and an optional global
    log file); later calls return the same logger. Training runs attach a
    DEBUG-level file inside their output directory with ``attach_file``,
    so every run folder carries its own step-by-step log.
    """

    _instance: Optional[logging.Logger] = None
    _files: Dict[str, logging.Handler] = {}

    @classmethod
    def get_logger(cls, name: str = "HPGAN", level: str = "INFO",
                   file_path: Optional[str] = None) -> logging.Logger:
        """
        Get or create the harness logger.

        Args:
            name: Logger name
            level: Console level (DEBUG, INFO, WARNING, ERROR)
            file_path: Optional global log file

        Returns:
            Configured logger instance
        """
        if cls._instance is not None:
            return cls._instance

        logger = logging.getLogger(name)
        logger.setLevel(logging.DEBUG)
        logger.propagate = False
        logger.handlers = []

        console = logging.StreamHandler(sys.stdout)
        console.setLevel(_level(level))
        console.setFormatter(logging.Formatter(CONSOLE_FORMAT))
        logger.addHandler(console)

        cls._instance = logger
        if file_path:
            cls.attach_file(file_path)
        return logger

    @classmethod
    def attach_file(cls, file_path: str) -> Optional[logging.Handler]:
        """
        Also write everything (DEBUG and up) to ``file_path``.

        Attaching the same path twice is a no-op.

        Returns:
            The file handler, or None if the file could not be opened
        """
        logger = cls.get_logger()
        key = str(Path(file_path).resolve())
        if key in cls._files:
            return cls._files[key]
        try:
            Path(file_path).parent.mkdir(parents=True, exist_ok=True)
            handler = logging.FileHandler(file_path, encoding='utf-8')
        except OSError as e:
            logger.warning(f"Could not create log file: {e}")
            return None
        handler.setLevel(logging.DEBUG)
        handler.setFormatter(logging.Formatter(FILE_FORMAT, datefmt=DATE_FORMAT))
        logger.addHandler(handler)
        cls._files[key] = handler
        return handler

    @classmethod
    def detach_file(cls, file_path: str):
        """Stop writing to a file attached with ``attach_file``"""
        handler = cls._files.pop(str(Path(file_path).resolve()), None)
        if handler is not None and cls._instance is not None:
            cls._instance.removeHandler(handler)
            handler.close()

    @classmethod
    def reset(cls):
        """Drop the cached logger so the next call reconfigures handlers"""
        if cls._instance is not None:
            for handler in list(cls._instance.handlers):
                handler.close()
            cls._instance.handlers = []
        cls._instance = None
        cls._files = {}


def get_logger(name: str = "HPGAN") -> logging.Logger:
    """Convenience function to get logger"""
    return Logger.get_logger(name)
