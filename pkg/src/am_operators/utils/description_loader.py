"""Loader for the bundled example descriptions."""

from pathlib import Path

from ..description import SUFFIX_FORMATS, parse_description
from ..errors import AMOperatorsError
from ..schemas.description import OperatorDescription
from .logger import get_logger


class DescriptionLoader:
    """Finds and parses description files in a directory."""

    def __init__(self, descriptions_dir: str = "config/descriptions"):
        """Initialize the loader.

        Args:
            descriptions_dir: Directory containing .json/.yaml/.yml descriptions
        """
        self.descriptions_dir = Path(descriptions_dir)
        self.logger = get_logger(__name__)

    def _paths(self) -> dict[str, Path]:
        if not self.descriptions_dir.exists():
            return {}
        paths: dict[str, Path] = {}
        for path in sorted(self.descriptions_dir.iterdir()):
            if path.suffix.lower() in SUFFIX_FORMATS:
                paths.setdefault(path.stem, path)
        return paths

    def get_available_descriptions(self) -> list[str]:
        """Names of the available descriptions (file stems), sorted."""
        return list(self._paths())

    def path_for(self, name: str) -> Path:
        """Path of a description by name.

        Raises:
            FileNotFoundError: If no description has that name
        """
        try:
            return self._paths()[name]
        except KeyError:
            raise FileNotFoundError(f"Description '{name}' not found in {self.descriptions_dir}") from None

    def load_description(self, name: str) -> OperatorDescription:
        """Load and validate a description by name.

        Raises:
            FileNotFoundError: If no description has that name
            DescriptionError: If the document is malformed or off-schema
            OperatorModelError: If the described operator is invalid
        """
        description = parse_description(self.path_for(name))
        self.logger.info(f"Loaded description: {name}")
        return description

    def list_descriptions_with_notes(self) -> list[tuple[str, str]]:
        """``(name, notes)`` for every description; unreadable ones are flagged."""
        listing = []
        for name in self.get_available_descriptions():
            try:
                description = self.load_description(name)
                listing.append((name, description.notes or description.kind))
            except (AMOperatorsError, OSError) as e:
                self.logger.warning(f"Failed to load description {name}: {e}")
                listing.append((name, "Failed to load description"))
        return listing

    def validate_description(self, name: str) -> tuple[bool, str | None]:
        """Parse-only check of one description.

        Returns:
            Tuple of (is_valid, error_message)
        """
        try:
            self.load_description(name)
            return True, None
        except (AMOperatorsError, OSError) as e:
            return False, str(e)
