"""Tests for the catalog plan and construction manager."""

import pytest

from constructions.abelian import AbelianConstruction
from constructions.exceptional import ExceptionalConstruction
from constructions.manager import ConstructionManager, catalog_plan
from constructions.quotient import OrbitQuotientConstruction
from services.parallel import first_witness, scan_ranges, split_range


class TestCatalogPlan:

    def test_p2(self):
        assert list(catalog_plan(2)) == ["Z2xZ2xZ2", "Z2xZ4", "Z8", "Q2", "Q3", "Q4", "exceptional-8"]

    def test_odd_prime(self):
        plan = catalog_plan(5)
        assert list(plan) == ["Z5xZ5xZ5", "Z5xZ25", "Z125", "Q2", "Q3", "Q4", "Q5"]
        assert plan["Q5"] == {'kind': 'orbit', 'label': 'O5'}


class TestConstructionManager:

    def test_instantiates_each_kind(self):
        manager = ConstructionManager(2, catalog_plan(2))
        assert isinstance(manager.get("Z8"), AbelianConstruction)
        assert isinstance(manager.get("Q3"), OrbitQuotientConstruction)
        assert isinstance(manager.get("exceptional-8"), ExceptionalConstruction)

    def test_descriptors(self):
        manager = ConstructionManager(3, catalog_plan(3))
        assert manager.get("Z3xZ9").descriptor == "abelian:3,9"
        assert manager.get("Q4").descriptor == "orbit:O4"

    def test_loop_is_cached(self):
        manager = ConstructionManager(3, catalog_plan(3))
        construction = manager.get("Q2")
        assert construction.loop() is construction.loop()

    def test_orbit_quotient_creates_q1(self):
        manager = ConstructionManager(3, catalog_plan(3))
        q1 = manager.orbit_quotient("O1")
        assert q1.name == "Q1"
        assert manager.get("Q1") is q1
        assert "Q1" not in manager.constructions
        assert manager.orbit_quotient("O3") is manager.get("Q3")

    def test_unknown_entry(self):
        manager = ConstructionManager(3, catalog_plan(3))
        with pytest.raises(ValueError, match="No construction available"):
            manager.get("Q9")

    def test_unknown_kind(self):
        with pytest.raises(ValueError, match="Unknown construction kind: moufang-extension"):
            ConstructionManager(3, {"weird": {'kind': 'moufang-extension'}})

    def test_kinds_resolve_to_modules(self):
        manager = ConstructionManager(3, {})
        assert manager._get_construction_info('orbit') == (
            'OrbitQuotientConstruction', 'constructions.quotient'
        )

    def test_exceptional_needs_p2(self):
        with pytest.raises(ValueError, match="only exists for p=2"):
            ExceptionalConstruction("exceptional-8", 3, {}).loop()


class TestParallel:

    def test_split_range(self):
        assert split_range(10, 3) == [(0, 4), (4, 7), (7, 10)]
        assert split_range(2, 5) == [(0, 1), (1, 2)]
        assert split_range(5, 0) == [(0, 5)]

    def test_scan_ranges_in_order(self):
        assert scan_ranges(_span, 10, ("r",), workers=3) == [("r", 0, 4), ("r", 4, 7), ("r", 7, 10)]

    def test_first_witness(self):
        assert first_witness([None, 3, 5]) == 3
        assert first_witness([None, None]) is None


def _span(tag, start, stop):
    return tag, start, stop
