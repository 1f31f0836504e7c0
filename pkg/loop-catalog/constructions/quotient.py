"""Quotients of F_p by the named orbit representatives."""

from services.classifier import QuotientLoop, Subspace3, named_representative, quotient_loop
from services.loop_core import CayleyLoop, subloop_generated

from .base import LoopConstruction


class OrbitQuotientConstruction(LoopConstruction):

    is_quotient = True

    @property
    def label(self) -> str:
        return self.config['label']

    @property
    def subspace(self) -> Subspace3:
        return named_representative(self.p, self.label)

    @property
    def descriptor(self) -> str:
        return f"orbit:{self.label}"

    def quotient(self) -> QuotientLoop:
        cached = self._get_from_cache('quotient')
        if cached is None:
            cached = quotient_loop(self.p, self.subspace)
            self._set_cache('quotient', cached)
        return cached

    def build(self) -> CayleyLoop:
        return self.quotient().loop

    def two_generated(self) -> bool:
        """Whether the images of x and y generate the whole quotient."""
        q = self.quotient()
        return len(subloop_generated(q.loop, [q.x, q.y])) == q.loop.order
