"""Abelian groups of order p^3."""

from services.loop_core import AbelianGroup, CayleyLoop, abelian_group_loop

from .base import LoopConstruction


class AbelianConstruction(LoopConstruction):

    @property
    def group(self) -> AbelianGroup:
        return AbelianGroup(tuple(self.config['moduli']))

    @property
    def descriptor(self) -> str:
        return "abelian:" + ",".join(str(m) for m in self.group.moduli)

    def build(self) -> CayleyLoop:
        return abelian_group_loop(self.group.moduli)
