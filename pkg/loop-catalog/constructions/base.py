"""Base class for catalog loop constructions."""

from abc import ABC, abstractmethod
from typing import Any, Dict, Optional

from services.loop_core import CayleyLoop


class LoopConstruction(ABC):
    """One named way of producing a loop of order p^3."""

    is_quotient = False

    def __init__(self, name: str, p: int, config: Dict[str, Any]):
        self.name = name
        self.p = p
        self.config = config
        self.cache: Dict[str, Any] = {}

    def _get_from_cache(self, cache_key: str) -> Optional[Any]:
        return self.cache.get(cache_key)

    def _set_cache(self, cache_key: str, data: Any):
        self.cache[cache_key] = data

    def loop(self) -> CayleyLoop:
        """The constructed loop, built once."""
        cached = self._get_from_cache('loop')
        if cached is None:
            cached = self.build()
            self._set_cache('loop', cached)
        return cached

    @property
    @abstractmethod
    def descriptor(self) -> str:
        """Construction string recorded in reports, e.g. 'abelian:3,9'."""
        pass

    @abstractmethod
    def build(self) -> CayleyLoop:
        """Build the Cayley table."""
        pass
