"""Cache of reliability profiles keyed by their signature.

Monte Carlo profiles dominate construction time; sweeps and repeated
``construct`` runs with the same channel, length, method, trial count and
seed load them from the store instead of recomputing.
"""

import logging
import os
from pathlib import Path
from typing import Any

from .context import Context, get_current_context
from .persistence_backends import FileSystemBackend, InMemoryBackend, PersistenceBackend
from .serializers import JSONSerializer, SerializationError, Serializer

logger = logging.getLogger(__name__)

DEFAULT_FILESYSTEM_DIR = os.path.join(os.getcwd(), '.cache', 'qpolar')


class ProfileStore:
    """Saves and loads serialized profiles through a backend."""

    def __init__(self, backend: PersistenceBackend, serializer: Serializer | None = None):
        self._backend = backend
        self._serializer = serializer or JSONSerializer()

    def save(self, data: Any, key: str | int) -> None:
        """Save a profile document.

        Raises:
            RuntimeError: If the document cannot be serialized or written.
        """
        try:
            self._backend.save(key=str(key), data=self._serializer.serialize(data))
        except (SerializationError, RuntimeError) as e:
            raise RuntimeError(f"Failed to save profile: {e}") from e

    def load(self, key: str | int) -> Any:
        """Load a profile document.

        Raises:
            FileNotFoundError: If nothing is stored under key.
            RuntimeError: If the stored document is unreadable.
        """
        try:
            return self._serializer.deserialize(self._backend.load(str(key)))
        except FileNotFoundError:
            raise FileNotFoundError(f"No cached profile found for key: {key}") from None
        except (SerializationError, RuntimeError) as e:
            raise RuntimeError(f"Failed to load profile: {e}") from e

    def exists(self, key: str | int) -> bool:
        return self._backend.exists(str(key))

    def invalidate(self, key: str | int | None = None) -> None:
        """Drop one cached profile, or all of them when key is None."""
        keys = self._backend.list_keys() if key is None else [str(key)]
        for k in keys:
            try:
                self._backend.delete(k)
            except RuntimeError:
                logger.warning("Could not delete cached profile %s", k)


def set_profile_store(backend: ProfileStore | PersistenceBackend | str | Path | None = None) -> Context:
    """Return a child of the current context that caches profiles.

    ``backend`` may be a ProfileStore, a backend instance, ``"memory"``,
    ``"filesystem"`` (the default cache directory) or a directory path.
    """
    context = get_current_context()
    if isinstance(backend, ProfileStore):
        return context.replace(_qp_store=backend)
    if backend is None or backend == "filesystem":
        backend = FileSystemBackend(DEFAULT_FILESYSTEM_DIR)
    elif backend == "memory":
        backend = InMemoryBackend()
    elif isinstance(backend, (str, Path)):
        backend = FileSystemBackend(backend)
    return context.replace(_qp_store=ProfileStore(backend))


def current_store() -> ProfileStore | None:
    return getattr(get_current_context(), '_qp_store', None)
