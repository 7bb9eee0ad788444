from fractions import Fraction

import pytest

from peersel import (
    BudgetExceededError,
    PeerselError,
    PreferenceWeights,
    Theorem4Construction,
    Theorem5bConstruction,
    WitnessStatus,
    build_two_state_problem,
    impossibility_witness,
    theorem5b_network,
)


class TestConstructions:
    def test_enemy_clique_states(self):
        c = Theorem4Construction(5)
        left, right = c.states()
        assert left.network.n == right.network.n == 5
        assert left.needy == frozenset({0})
        assert right.needy == frozenset({4})
        # left: enemies exactly within the first n-2 agents
        assert left.network.enemies_of(0) == frozenset({1, 2})
        assert left.network.enemies_of(4) == frozenset()
        # right: the single enmity joins the last two agents
        assert right.network.enemies_of(3) == frozenset({4})
        assert right.network.enemies_of(0) == frozenset()

    def test_minimum_size(self):
        with pytest.raises(PeerselError):
            Theorem4Construction(3)

    def test_clique_sizes_positive(self):
        with pytest.raises(PeerselError):
            Theorem5bConstruction(1, 0, 1, 1)

    def test_clique_network_shape(self):
        net = theorem5b_network(1, 2, 1, 1)
        assert net.n == 5
        # X1 = {0}, X2 = {1,2}, Y1 = {3}, Y2 = {4}
        assert net.friends_of(1) == frozenset({2})
        assert net.enemies_of(0) == frozenset({1, 2})
        assert net.enemies_of(3) == frozenset({4})
        assert net.impartials_of(0) == frozenset({3, 4})


class TestTheorem4:
    def test_infeasible_with_checkable_certificate(self):
        w = impossibility_witness(Theorem4Construction(4))
        assert w.status is WitnessStatus.INFEASIBLE
        assert w.certificate
        assert all(e.tag for e in w.certificate)
        assert w.verify()

    def test_relaxation_is_feasible(self):
        w = impossibility_witness(Theorem4Construction(4), drop_efficiency_at=0)
        assert w.status is WitnessStatus.FEASIBLE
        assert w.verify()
        assert w.feasible_point
        # the surviving efficiency state still pushes all mass to its needy set
        total = sum(w.feasible_point.values(), Fraction(0))
        assert total >= 0

    def test_weighted_variant_also_infeasible(self):
        w = impossibility_witness(
            Theorem4Construction(4),
            weights=PreferenceWeights(Fraction(3), Fraction(1, 2)),
        )
        assert w.status is WitnessStatus.INFEASIBLE
        assert w.verify()


class TestTheorem5b:
    def test_singleton_cliques_infeasible(self):
        w = impossibility_witness(Theorem5bConstruction(1, 1, 1, 1))
        assert w.status is WitnessStatus.INFEASIBLE
        assert w.verify()

    def test_relaxed_feasible(self):
        w = impossibility_witness(Theorem5bConstruction(1, 1, 1, 1), drop_efficiency_at=1)
        assert w.status is WitnessStatus.FEASIBLE
        assert w.verify()


class TestProblemShape:
    def test_tags_cover_families(self):
        # the enemy-clique construction has no friendships, so no friend rows
        prob = build_two_state_problem(Theorem4Construction(4))
        tags = {c.tag.split("[")[0] for c in prob.constraints}
        assert tags == {"validity", "efficiency", "own", "enemies"}
        # a construction with a 2-clique emits friend rows too
        prob = build_two_state_problem(Theorem5bConstruction(2, 1, 1, 1))
        tags = {c.tag.split("[")[0] for c in prob.constraints}
        assert {"validity", "efficiency", "own", "friends", "enemies"} <= tags

    def test_weighted_rows_replace_split_rows(self):
        prob = build_two_state_problem(
            Theorem4Construction(4),
            weights=PreferenceWeights(Fraction(1), Fraction(1)),
        )
        tags = {c.tag.split("[")[0] for c in prob.constraints}
        assert "weighted" in tags
        assert "friends" not in tags and "enemies" not in tags

    def test_drop_efficiency_removes_one_state(self):
        full = build_two_state_problem(Theorem4Construction(4))
        dropped = build_two_state_problem(Theorem4Construction(4), drop_efficiency_at=0)
        eff = lambda p: [c for c in p.constraints if c.tag.startswith("efficiency")]
        assert len(eff(dropped)) == len(eff(full)) - 1

    def test_var_budget(self):
        with pytest.raises(BudgetExceededError):
            build_two_state_problem(Theorem4Construction(4), var_budget=4)

    def test_drop_index_validated(self):
        with pytest.raises(PeerselError):
            build_two_state_problem(Theorem4Construction(4), drop_efficiency_at=2)
