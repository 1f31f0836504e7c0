"""Tests for the Cayley-table loop engine."""

import numpy as np
import pytest

from errors import BudgetExceeded, LoopError, LoopValidationError, NotCommutativeError, NotNormalError, OrderCapExceeded
from services.loop_core import (
    AbelianGroup,
    abelian_group_loop,
    apply_isomorphism,
    associator,
    associator_values,
    build_loop,
    catalog_groups,
    center,
    class_two_linearity,
    divide,
    element_order,
    element_orders,
    inner_generators,
    invariant_subsets,
    is_automorphic,
    is_commutative,
    is_group,
    is_isomorphic,
    is_power_associative,
    power,
    quotient,
    structure_profile,
    subloop_generated,
)


def _relabel(Q, seed=0):
    rng = np.random.default_rng(seed)
    sigma = np.concatenate([[0], 1 + rng.permutation(Q.order - 1)])
    return build_loop(apply_isomorphism(Q, sigma)), sigma


class TestBuildLoop:

    def test_trivial_loop(self):
        Q = build_loop([[0]])
        assert Q.order == 1

    def test_exceptional_table_is_valid(self, exceptional):
        assert exceptional.order == 8
        assert exceptional.is_commutative

    def test_repeated_entry_is_rejected(self):
        with pytest.raises(LoopValidationError, match="not a Latin square") as exc:
            build_loop([[0, 1], [1, 1]])
        assert exc.value.witness == ("row", 1)

    def test_repeated_column_entry_is_rejected(self):
        with pytest.raises(LoopValidationError, match="not a Latin square: column"):
            build_loop([[0, 1, 2], [1, 2, 0], [2, 1, 0]])

    def test_missing_identity_is_rejected(self):
        with pytest.raises(LoopValidationError, match="index 0 is not an identity"):
            build_loop([[1, 0], [0, 1]])

    def test_non_square_is_rejected(self):
        with pytest.raises(LoopValidationError, match="square"):
            build_loop([[0, 1, 2], [1, 2, 0]])

    def test_out_of_range_entry_is_rejected(self):
        with pytest.raises(LoopValidationError, match="0..1"):
            build_loop([[0, 2], [1, 0]])

    def test_order_cap(self):
        with pytest.raises(OrderCapExceeded, match="order cap exceeded"):
            build_loop(abelian_group_loop((8,)).table, order_cap=4)

    def test_table_is_read_only(self, z3):
        with pytest.raises(ValueError):
            z3.table[1, 1] = 0


class TestDivision:

    def test_left_division_by_identity(self, exceptional):
        for b in range(8):
            assert divide(exceptional, 0, b, "left") == b

    def test_exceptional_left_division(self, exceptional):
        assert divide(exceptional, 6, 5, "left") == 3

    def test_z3_left_division(self, z3):
        assert divide(z3, 1, 0, "left") == 2

    @pytest.mark.parametrize("name", ["exceptional", "s3", "non_automorphic_6"])
    def test_division_identities(self, name, request):
        Q = request.getfixturevalue(name)
        T = Q.table
        for a in range(Q.order):
            for b in range(Q.order):
                assert T[a, divide(Q, a, b, "left")] == b
                assert T[divide(Q, a, b, "right"), a] == b

    def test_unknown_side(self, z3):
        with pytest.raises(ValueError):
            divide(z3, 1, 1, "up")


class TestInnerGenerators:

    def test_left_inner_by_identity_is_trivial(self, exceptional):
        for m in inner_generators(exceptional, commutative_only=True):
            if m.x == 0:
                assert m.is_identity

    def test_abelian_group_has_trivial_inner_mappings(self):
        G = abelian_group_loop((2, 4))
        assert all(m.is_identity for m in inner_generators(G))

    def test_exceptional_has_nontrivial_inner_mapping(self, exceptional):
        assert any(not m.is_identity for m in inner_generators(exceptional, commutative_only=True))

    def test_counts(self, s3):
        assert sum(1 for _ in inner_generators(s3)) == 2 * 36 + 6
        assert sum(1 for _ in inner_generators(s3, commutative_only=True)) == 36

    def test_inner_mappings_are_permutations(self, s3):
        for m in inner_generators(s3):
            assert sorted(m.images) == list(range(6))

    def test_middle_inner_mapping_is_conjugation(self, s3):
        T = s3.table
        for m in inner_generators(s3):
            if m.kind == "T":
                for z in range(6):
                    # T_x(z) = x \ (z x)
                    assert T[m.x, m.images[z]] == T[z, m.x]


class TestIsAutomorphic:

    @pytest.mark.parametrize("moduli", [(8,), (2, 4), (3, 3), (2, 2, 2)])
    def test_abelian_groups(self, moduli):
        G = abelian_group_loop(moduli)
        assert is_automorphic(G, "inner").holds
        assert is_automorphic(G, "identityA").holds

    def test_exceptional(self, exceptional):
        assert is_automorphic(exceptional, "inner").holds
        verdict = is_automorphic(exceptional, "identityA")
        assert verdict.holds
        assert verdict.checked == 8 ** 4

    def test_exceptional_sampled(self, exceptional):
        verdict = is_automorphic(exceptional, "identityA", exhaustive=False, sample=1000, seed=3)
        assert verdict.holds
        assert verdict.checked == 1000

    def test_nonabelian_group(self, s3):
        assert is_automorphic(s3, "inner").holds

    def test_identity_a_needs_commutativity(self, s3):
        with pytest.raises(NotCommutativeError, match="not commutative"):
            is_automorphic(s3, "identityA")

    def test_non_automorphic_witness(self, non_automorphic_6):
        Q = non_automorphic_6
        T, ldiv = Q.table, Q.ldiv
        verdict = is_automorphic(Q, "identityA")
        assert not verdict.holds
        y, x, a, b = verdict.witness

        def phi(z):
            return ldiv[T[y, x], T[y, T[x, z]]]

        assert phi(T[a, b]) != T[phi(a), phi(b)]

    def test_non_automorphic_inner(self, non_automorphic_6):
        verdict = is_automorphic(non_automorphic_6, "inner")
        assert not verdict.holds
        assert verdict.witness[0] == "L"

    def test_non_automorphic_sampled(self, non_automorphic_6):
        verdict = is_automorphic(non_automorphic_6, "identityA", exhaustive=False, sample=100_000, seed=0)
        assert not verdict.holds

    def test_parallel_scan_agrees(self, exceptional, non_automorphic_6):
        assert is_automorphic(exceptional, "inner", workers=2).holds
        assert not is_automorphic(non_automorphic_6, "inner", workers=2).holds

    def test_inner_mappings_are_automorphisms_pointwise(self, exceptional):
        T = exceptional.table
        for m in inner_generators(exceptional):
            phi = m.images
            assert np.array_equal(phi[T], T[phi[:, None], phi[None, :]])

    def test_linearity_needs_central_associators(self, exceptional):
        with pytest.raises(LoopError, match="not central"):
            class_two_linearity(exceptional)

    def test_unknown_method(self, z3):
        with pytest.raises(ValueError):
            is_automorphic(z3, "bogus")


class TestAssociator:

    def test_group_associators_vanish(self, s3):
        assert list(associator_values(s3)) == [0]

    def test_exceptional_associator(self, exceptional):
        assert associator(exceptional, 4, 5, 6) == 3

    def test_associator_definition(self, exceptional):
        T = exceptional.table
        for x, y, z in [(1, 4, 5), (4, 5, 6), (7, 6, 5)]:
            a = associator(exceptional, x, y, z)
            assert T[T[x, T[y, z]], a] == T[T[x, y], z]


class TestInvariantSubsets:

    def test_abelian_group(self):
        G = abelian_group_loop((2, 4))
        subsets = invariant_subsets(G)
        assert len(subsets.center) == 8
        assert subsets.associator_subloop.members == (0,)

    def test_exceptional_center_is_trivial(self, exceptional):
        assert invariant_subsets(exceptional).center.members == (0,)

    def test_nonabelian_group(self, s3):
        subsets = invariant_subsets(s3)
        assert subsets.center.members == (0,)
        assert len(subsets.nucleus) == 6
        assert len(subsets.left_nucleus) == len(subsets.middle_nucleus) == len(subsets.right_nucleus) == 6

    def test_subloop_generated(self):
        G = abelian_group_loop((2, 4))
        # index 2 is (0, 2)
        assert subloop_generated(G, [2]).members == (0, 2)
        assert len(subloop_generated(G, [1, 4])) == 8


class TestQuotient:

    def test_trivial_subloop(self, exceptional):
        result = quotient(exceptional, subloop_generated(exceptional, []))
        assert result.loop == exceptional

    def test_whole_loop(self, exceptional):
        result = quotient(exceptional, subloop_generated(exceptional, range(8)))
        assert result.loop.order == 1
        assert set(result.coset_map) == {0}

    def test_coset_map_is_homomorphism(self):
        G = abelian_group_loop((2, 4))
        result = quotient(G, subloop_generated(G, [2]), debug=True)
        cm, QT = result.coset_map, result.loop.table
        assert result.loop.order == 4
        assert np.array_equal(cm[G.table], QT[cm[:, None], cm[None, :]])

    def test_non_normal_subgroup(self, s3):
        with pytest.raises(NotNormalError, match="subloop not normal") as exc:
            quotient(s3, subloop_generated(s3, [1]))
        assert exc.value.witness[0].startswith("T[")


class TestStructureProfile:

    def test_z2_z4(self):
        profile = structure_profile(abelian_group_loop((2, 4)))
        assert profile.order_spectrum == {1: 1, 2: 3, 4: 4}
        assert profile.nilpotency_class == 1
        assert profile.is_group and profile.is_commutative and profile.is_power_associative

    def test_exceptional(self, exceptional):
        profile = structure_profile(exceptional)
        assert profile.center_size == 1
        assert profile.nilpotency_class == "not nilpotent"
        assert profile.is_power_associative
        assert not profile.is_group

    def test_trivial_loop(self):
        assert structure_profile(build_loop([[0]])).nilpotency_class == 0

    def test_nonabelian_group_is_not_nilpotent(self, s3):
        assert structure_profile(s3).nilpotency_class == "not nilpotent"

    def test_group_and_commutativity_predicates(self, s3, exceptional):
        assert is_group(s3) and not is_commutative(s3)
        assert is_commutative(exceptional) and not is_group(exceptional)
        profile = structure_profile(s3)
        assert profile.is_group and not profile.is_commutative

    def test_powers(self):
        Z6 = abelian_group_loop((6,))
        assert power(Z6, 2, 2) == 4
        assert power(Z6, 5, 0) == 0
        assert element_order(Z6, 2) == 3
        assert list(element_orders(Z6)) == [1, 6, 3, 2, 3, 6]

    def test_power_associativity_failure(self):
        # x * x = 2 and x * 2 = 0 but 2 * x = 3
        table = [
            [0, 1, 2, 3, 4],
            [1, 2, 0, 4, 3],
            [2, 3, 4, 1, 0],
            [3, 4, 1, 0, 2],
            [4, 0, 3, 2, 1],
        ]
        assert not is_power_associative(build_loop(table))


class TestIsomorphism:

    def test_reflexive(self, exceptional):
        result = is_isomorphic(exceptional, exceptional)
        assert result.isomorphic
        assert np.array_equal(apply_isomorphism(exceptional, result.mapping), exceptional.table)

    @pytest.mark.parametrize("name", ["exceptional", "s3", "non_automorphic_6"])
    def test_relabelled_copy(self, name, request):
        Q = request.getfixturevalue(name)
        R, _ = _relabel(Q, seed=7)
        forward = is_isomorphic(Q, R)
        backward = is_isomorphic(R, Q)
        assert forward.isomorphic and backward.isomorphic
        assert np.array_equal(apply_isomorphism(Q, forward.mapping), R.table)
        assert np.array_equal(apply_isomorphism(R, backward.mapping), Q.table)

    def test_spectra_differ(self):
        result = is_isomorphic(abelian_group_loop((8,)), abelian_group_loop((2, 4)))
        assert not result.isomorphic
        assert result.reason == "order_spectrum differs"

    def test_orders_differ(self, z3, exceptional):
        assert not is_isomorphic(z3, exceptional).isomorphic

    def test_budget(self):
        G = abelian_group_loop((2, 2, 2))
        R, _ = _relabel(G, seed=1)
        with pytest.raises(BudgetExceeded, match="budget exceeded"):
            is_isomorphic(G, R, node_budget=2)


class TestCatalogGroups:

    def test_p2(self):
        groups = catalog_groups(2)
        assert [G.name for G, _ in groups] == ["Z2xZ2xZ2", "Z2xZ4", "Z8"]
        spectra = [structure_profile(Q).order_spectrum for _, Q in groups]
        assert all(Q.order == 8 for _, Q in groups)
        assert len({tuple(sorted(s.items())) for s in spectra}) == 3

    def test_p3(self):
        (_, elementary), _, (_, cyclic) = catalog_groups(3)
        assert max(element_orders(cyclic)) == 27
        assert max(element_orders(elementary)) == 3

    def test_p5_pairwise_nonisomorphic(self):
        loops = [Q for _, Q in catalog_groups(5)]
        for i in range(3):
            for j in range(i + 1, 3):
                assert not is_isomorphic(loops[i], loops[j]).isomorphic

    def test_order_cap(self):
        with pytest.raises(OrderCapExceeded, match="order cap exceeded"):
            catalog_groups(5, order_cap=100)

    def test_abelian_group_indexing(self):
        G = AbelianGroup((3, 9))
        assert G.encode((1, 2)) == 11
        assert G.decode(11) == (1, 2)
        assert G.add((2, 8), (1, 1)) == (0, 0)
