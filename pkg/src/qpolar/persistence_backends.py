"""Byte stores backing the reliability-profile cache."""

from pathlib import Path
from typing import Protocol, runtime_checkable


@runtime_checkable
class PersistenceBackend(Protocol):
    """Protocol defining the interface for persistence backends."""

    def save(self, key: str, data: bytes) -> None:
        """Save data under key.

        Raises:
            RuntimeError: If saving fails.
        """
        ...

    def load(self, key: str) -> bytes:
        """Load data stored under key.

        Raises:
            FileNotFoundError: If the data doesn't exist.
            RuntimeError: If loading fails.
        """
        ...

    def exists(self, key: str) -> bool:
        ...

    def delete(self, key: str) -> None:
        ...

    def list_keys(self) -> list[str]:
        ...


class FileSystemBackend:
    """One JSON file per key in a directory."""

    def __init__(self, base_dir: str | Path):
        self.base_dir = Path(base_dir)
        self.base_dir.mkdir(parents=True, exist_ok=True)

    def _get_path(self, key: str) -> Path:
        return self.base_dir / f"{key}.json"

    def save(self, key: str, data: bytes) -> None:
        path = self._get_path(key)
        tmp = self.base_dir / f"{key}.json.tmp"
        try:
            tmp.write_bytes(data)
            tmp.replace(path)
        except OSError as e:
            raise RuntimeError(f"Failed to save data to {path}: {e}") from e

    def load(self, key: str) -> bytes:
        path = self._get_path(key)
        try:
            return path.read_bytes()
        except FileNotFoundError:
            raise FileNotFoundError(f"No data found for key: {key}") from None
        except OSError as e:
            raise RuntimeError(f"Failed to load data from {path}: {e}") from e

    def exists(self, key: str) -> bool:
        return self._get_path(key).exists()

    def delete(self, key: str) -> None:
        path = self._get_path(key)
        try:
            path.unlink(missing_ok=True)
        except OSError as e:
            raise RuntimeError(f"Failed to delete data at {path}: {e}") from e

    def list_keys(self) -> list[str]:
        return sorted(path.stem for path in self.base_dir.glob("*.json"))


class InMemoryBackend:
    """In-memory backend, not persistent across runs."""

    def __init__(self) -> None:
        self._data: dict[str, bytes] = {}

    def save(self, key: str, data: bytes) -> None:
        if not isinstance(data, bytes):
            raise RuntimeError("Data must be bytes")
        self._data[key] = data

    def load(self, key: str) -> bytes:
        if key not in self._data:
            raise FileNotFoundError(f"No data found for key: {key}")
        return self._data[key]

    def exists(self, key: str) -> bool:
        return key in self._data

    def delete(self, key: str) -> None:
        self._data.pop(key, None)

    def list_keys(self) -> list[str]:
        return sorted(self._data)
