"""Run settings shared by construction, simulation and the CLI.

Settings are looked up through a per-thread stack of contexts.  Worker
threads spawned by :mod:`qpolar.workers` see the default settings, so
callers resolve ``threads`` and the profile store before fanning out.
"""

import threading
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Any

DEFAULT_CONTEXT_SETTINGS = MappingProxyType({
    'threads': 1,
    '_qp_store': None,
})


@dataclass(frozen=True, eq=False)
class Context:
    """Immutable run settings; unknown names fall through to the enclosing context."""

    _settings: MappingProxyType = field(default_factory=lambda: MappingProxyType({}))
    _parent: 'Context | None' = None

    def __init__(self, **settings: Any) -> None:
        object.__setattr__(self, '_settings', MappingProxyType(settings))
        object.__setattr__(self, '_parent', None)

    def __getattr__(self, name: str) -> Any:  # noqa: ANN401
        if name.startswith('__'):
            raise AttributeError(name)
        if name in self._settings:
            return self._settings[name]
        if self._parent is not None:
            return getattr(self._parent, name)
        raise AttributeError(f"Run setting '{name}' not found in context or parent contexts")

    def replace(self, **settings: Any) -> 'Context':
        """A child context overriding some settings."""
        child = Context(**{**self._settings, **settings})
        object.__setattr__(child, '_parent', self)
        return child

    def __enter__(self) -> 'Context':
        _context_stack.push(self)
        return self

    def __exit__(self, exc_type: Any, exc_val: Any, exc_tb: Any) -> None:  # noqa: ANN401
        _context_stack.pop()


@dataclass
class ContextStack:
    """Per-thread stack of contexts over one shared default."""

    _local: threading.local = field(default_factory=threading.local)
    _default_context: Context = field(default_factory=lambda: Context(**DEFAULT_CONTEXT_SETTINGS))

    def push(self, context: Context) -> None:
        stack = self._stack()
        parent = stack[-1] if stack else self._default_context
        if context is not parent:
            object.__setattr__(context, '_parent', parent)
        stack.append(context)

    def pop(self) -> Context:
        stack = self._stack()
        if not stack:
            raise RuntimeError("Cannot pop from empty context stack")
        return stack.pop()

    def get_current(self) -> Context:
        stack = self._stack()
        return stack[-1] if stack else self._default_context

    def _stack(self) -> list[Context]:
        if not hasattr(self._local, 'stack'):
            self._local.stack = []
        return self._local.stack


_context_stack = ContextStack()


def get_current_context() -> Context:
    """The innermost active context of the calling thread."""
    return _context_stack.get_current()
