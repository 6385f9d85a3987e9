"""Tests for the reliability-profile store."""

import tempfile
from pathlib import Path

import pytest

from qpolar.context import get_current_context
from qpolar.persistence import ProfileStore, current_store, set_profile_store
from qpolar.persistence_backends import FileSystemBackend, InMemoryBackend, PersistenceBackend
from qpolar.signature import ProfileSignature
from qpolar.types import ReliabilityMethod


@pytest.fixture
def temp_cache_dir():
    """Create a temporary directory for cache files."""
    with tempfile.TemporaryDirectory() as temp_dir:
        yield temp_dir


@pytest.fixture
def store_with_filesystem(temp_cache_dir):
    """Create a ProfileStore with a filesystem backend."""
    return ProfileStore(backend=FileSystemBackend(temp_cache_dir))


@pytest.fixture
def store_with_memory():
    """Create a ProfileStore with an in-memory backend."""
    return ProfileStore(backend=InMemoryBackend())


@pytest.mark.parametrize("store_name", ["store_with_filesystem", "store_with_memory"])
def test_save_and_load(store_name: str, request: pytest.FixtureRequest) -> None:
    """Test saving and loading a profile document."""
    store = request.getfixturevalue(store_name)
    document = {'n': 4, 'amp': [0.1, 0.2, 0.3, 0.4]}
    store.save(document, 1234)
    assert store.exists(1234)
    assert store.load(1234) == document


def test_filesystem_layout(temp_cache_dir: str, store_with_filesystem: ProfileStore) -> None:
    """Test one JSON file per key and no leftover temporary files."""
    store_with_filesystem.save({'n': 1}, 'abc')
    assert sorted(p.name for p in Path(temp_cache_dir).iterdir()) == ['abc.json']


def test_invalid_data(store_with_filesystem: ProfileStore) -> None:
    """Test that unserializable documents are not stored."""
    class NonSerializable:
        pass

    with pytest.raises(RuntimeError, match="Failed to save"):
        store_with_filesystem.save(NonSerializable(), 'bad')
    assert not store_with_filesystem.exists('bad')


def test_nonexistent_key(store_with_memory: ProfileStore) -> None:
    """Test loading a missing key."""
    with pytest.raises(FileNotFoundError, match="No cached profile"):
        store_with_memory.load('missing')


def test_corrupt_file(temp_cache_dir: str, store_with_filesystem: ProfileStore) -> None:
    """Test that unreadable documents raise RuntimeError."""
    Path(temp_cache_dir, 'broken.json').write_bytes(b'{not json')
    with pytest.raises(RuntimeError, match="Failed to load"):
        store_with_filesystem.load('broken')


def test_invalidate(store_with_filesystem: ProfileStore) -> None:
    """Test invalidating one key and then all keys."""
    for key in ('a', 'b', 'c'):
        store_with_filesystem.save({'key': key}, key)
    store_with_filesystem.invalidate('a')
    assert not store_with_filesystem.exists('a')
    assert store_with_filesystem.exists('b')
    store_with_filesystem.invalidate()
    assert not store_with_filesystem.exists('b')
    assert not store_with_filesystem.exists('c')


def test_backends_follow_protocol() -> None:
    """Test runtime protocol conformance."""
    assert isinstance(InMemoryBackend(), PersistenceBackend)
    with tempfile.TemporaryDirectory() as temp_dir:
        assert isinstance(FileSystemBackend(temp_dir), PersistenceBackend)


def test_memory_backend_requires_bytes() -> None:
    """Test that the in-memory backend stores bytes only."""
    with pytest.raises(RuntimeError, match="bytes"):
        InMemoryBackend().save('k', 'text')


def test_set_profile_store(temp_cache_dir: str) -> None:
    """Test configuring a store through the context."""
    assert current_store() is None
    with set_profile_store("memory"):
        assert isinstance(current_store(), ProfileStore)
    with set_profile_store(temp_cache_dir):
        current_store().save({'x': 1}, 'k')
    assert Path(temp_cache_dir, 'k.json').exists()
    store = ProfileStore(InMemoryBackend())
    with set_profile_store(store):
        assert current_store() is store
        assert get_current_context().threads == 1
    assert current_store() is None


def test_signature_is_deterministic() -> None:
    """Test that equal parameters give equal keys and any change alters them."""
    params = {'channel': 'erasure:p=0.25', 'n': 64, 'method': ReliabilityMethod.MONTE_CARLO,
              'trials': 100, 'seed': 0}
    key = ProfileSignature.calculate('reliability_profile', 1, params)
    assert key == ProfileSignature.calculate('reliability_profile', 1, dict(reversed(params.items())))
    assert 0 <= key < 10**10
    assert key != ProfileSignature.calculate('reliability_profile', 2, params)
    assert key != ProfileSignature.calculate('reliability_profile', 1, {**params, 'seed': 1})
    assert key != ProfileSignature.calculate('reliability_profile', 1, {**params, 'trials': 100.0})
