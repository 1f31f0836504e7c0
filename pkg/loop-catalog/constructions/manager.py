"""Construction manager for the catalog of order p^3."""

import importlib
import logging
from typing import Any, Dict

from services.classifier import labels_for

from .base import LoopConstruction

logger = logging.getLogger(__name__)


def catalog_plan(p: int) -> Dict[str, Dict[str, Any]]:
    """Entry name -> construction config, in report order."""
    plan: Dict[str, Dict[str, Any]] = {
        f"Z{p}xZ{p}xZ{p}": {'kind': 'abelian', 'moduli': [p, p, p]},
        f"Z{p}xZ{p * p}": {'kind': 'abelian', 'moduli': [p, p * p]},
        f"Z{p ** 3}": {'kind': 'abelian', 'moduli': [p ** 3]},
    }
    for label in labels_for(p)[1:]:
        plan[f"Q{label[1:]}"] = {'kind': 'orbit', 'label': label}
    if p == 2:
        plan['exceptional-8'] = {'kind': 'exceptional'}
    return plan


class ConstructionManager:
    """Loads the constructions named in a catalog plan."""

    def __init__(self, p: int, plan: Dict[str, Dict[str, Any]]):
        self.p = p
        self.plan = plan
        self.constructions: Dict[str, LoopConstruction] = {}
        self._extra: Dict[str, LoopConstruction] = {}
        self._load_constructions()

    def _load_constructions(self):
        """Instantiate one construction per plan entry."""
        for name, config in self.plan.items():
            self.constructions[name] = self._instantiate(name, config)
            logger.debug(f"Loaded construction {name} ({config['kind']})")

    def _instantiate(self, name: str, config: Dict[str, Any]) -> LoopConstruction:
        class_name, module_name = self._get_construction_info(config['kind'])
        try:
            module = importlib.import_module(module_name)
            construction_class = getattr(module, class_name)
        except (ImportError, AttributeError) as e:
            raise ValueError(f"Failed to load construction for {name}: {e}")
        return construction_class(name, self.p, config)

    def _get_construction_info(self, kind: str) -> tuple[str, str]:
        """Class name and module name for a construction kind."""
        if kind == 'abelian':
            return 'AbelianConstruction', 'constructions.abelian'
        elif kind == 'orbit':
            return 'OrbitQuotientConstruction', 'constructions.quotient'
        elif kind == 'exceptional':
            return 'ExceptionalConstruction', 'constructions.exceptional'
        raise ValueError(f"Unknown construction kind: {kind}")

    def get(self, name: str) -> LoopConstruction:
        construction = self.constructions.get(name) or self._extra.get(name)
        if construction is None:
            raise ValueError(f"No construction available for entry: {name}")
        return construction

    def orbit_quotient(self, label: str) -> LoopConstruction:
        """The quotient construction for an orbit label, including O1 which is not a catalog entry."""
        for construction in list(self.constructions.values()) + list(self._extra.values()):
            if construction.is_quotient and construction.label == label:
                return construction
        name = f"Q{label[1:]}"
        self._extra[name] = self._instantiate(name, {'kind': 'orbit', 'label': label})
        return self._extra[name]
