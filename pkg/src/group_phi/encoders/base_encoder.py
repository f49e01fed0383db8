"""Base encoder class for turning event logs into state matrices.

This module provides the abstract base class all log encoders inherit from,
so every input format is recognized, read and validated the same way.
"""

from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, Optional, Union

import pandas as pd

from ..exceptions import InputFormatError

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


class BaseEncoder(ABC):
    """Abstract base class for all log encoders."""

    def __init__(self, config: Optional[dict[str, Any]] = None) -> None:
        """Initialize the encoder.

        Args:
            config: Optional encoder settings (thresholds, step sizes, ...).
        """
        self.config: dict[str, Any] = config or {}
        self.supported_extensions: list[str] = [".csv"]
        self.required_columns: list[str] = []
        self.encoder_name: str = ""

    def can_encode(self, file_path: PathLike) -> bool:
        """Check whether the file looks like this encoder's input format.

        The suffix must be supported and the header must carry every
        required column.
        """
        path = Path(file_path)
        if path.suffix.lower() not in self.supported_extensions or not path.is_file():
            return False
        try:
            header = pd.read_csv(path, nrows=0)
        except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError):
            return False
        return set(self.required_columns).issubset(header.columns)

    def read_table(self, file_path: PathLike, **kwargs: Any) -> pd.DataFrame:
        """Read a CSV input and check its required columns.

        Raises:
            FileNotFoundError: If the file does not exist.
            InputFormatError: If the file cannot be parsed or lacks a column.
        """
        path = Path(file_path)
        if not path.is_file():
            raise FileNotFoundError(f"Input file not found: {path}")
        try:
            frame = pd.read_csv(path, **kwargs)
        except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
            raise InputFormatError(f"Could not parse {path.name}: {e}", str(path)) from e
        except ValueError as e:
            raise InputFormatError(f"Bad value in {path.name}: {e}", str(path)) from e
        self.validate_columns(frame, path)
        logger.debug(f"{self.encoder_name}: read {len(frame)} rows from {path}")
        return frame

    def validate_columns(self, frame: pd.DataFrame, path: PathLike) -> None:
        missing = [c for c in self.required_columns if c not in frame.columns]
        if missing:
            raise InputFormatError(
                f"{Path(path).name} is missing required columns {missing}", str(path)
            )

    @abstractmethod
    def load(self, file_path: PathLike) -> Any:
        """Read the file into the encoder's record type.

        Args:
            file_path: Path to the log file.

        Returns:
            Records ready for :meth:`encode`.
        """

    @abstractmethod
    def encode(self, records: Any) -> Any:
        """Encode loaded records into one or more state matrices."""

    def encode_file(self, file_path: PathLike) -> Any:
        """Load and encode in one step."""
        return self.encode(self.load(file_path))
