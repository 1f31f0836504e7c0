"""The order-8 loop with trivial center."""

from services.loop_core import CayleyLoop, exceptional_loop_8

from .base import LoopConstruction


class ExceptionalConstruction(LoopConstruction):

    @property
    def descriptor(self) -> str:
        return "exceptional-8"

    def build(self) -> CayleyLoop:
        if self.p != 2:
            raise ValueError(f"exceptional-8 only exists for p=2, got p={self.p}")
        return exceptional_loop_8()
