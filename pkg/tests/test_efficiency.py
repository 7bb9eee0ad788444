from fractions import Fraction

import pytest

from peersel import (
    BudgetExceededError,
    MechanismHandle,
    MechanismKind,
    build_network,
    closed_form_prd,
    compare_mechanisms,
    degree_profile,
    duples_sb_lower_bound,
    exact_efficiency,
    mc_efficiency,
    rd_equals_prior_condition,
)

F = Fraction
HALF = F(1, 2)


class TestExact:
    def test_dictatorship_friend_clique(self, k4_friend, rd_handle):
        assert exact_efficiency(rd_handle, k4_friend, HALF) == F(7, 8)

    def test_dictatorship_matching(self, matching4, rd_handle):
        assert exact_efficiency(rd_handle, matching4, HALF) == HALF

    def test_constant_equals_prior(self, k4_friend, constant_handle):
        for q in (F(1, 4), F(1, 2), F(2, 3)):
            assert exact_efficiency(constant_handle, k4_friend, q) == q

    def test_impartial_votes_all_impartial(self, k3_impartial, g1_handle):
        assert exact_efficiency(g1_handle, k3_impartial, HALF) == F(7, 8)

    def test_duples_all_impartial(self, k3_impartial, duples_handle):
        assert exact_efficiency(duples_handle, k3_impartial, HALF) == F(3, 4)

    def test_pointwise_route_matches_closed_form(self, rd_handle):
        # n = 7 forces the per-profile route for full-report mechanisms
        k7 = build_network(
            7, [(i, j, "friend") for i in range(7) for j in range(i + 1, 7)]
        )
        assert exact_efficiency(rd_handle, k7, HALF) == closed_form_prd(k7, HALF)

    def test_budget(self, constant_handle):
        with pytest.raises(BudgetExceededError):
            exact_efficiency(constant_handle, build_network(21, []), HALF)

    def test_thread_count_does_not_change_result(self, rd_handle, monkeypatch):
        k7 = build_network(
            7, [(i, j, "friend") for i in range(7) for j in range(i + 1, 7)]
        )
        monkeypatch.setenv("PEERSEL_THREADS", "4")
        assert exact_efficiency(rd_handle, k7, F(1, 3)) == closed_form_prd(k7, F(1, 3))


class TestClosedForm:
    def test_degree_profile(self, matching4):
        prof = degree_profile(matching4)
        assert prof.n == 4
        assert prof.counts == ((1, 2),) * 4

    def test_exponent_tiers(self):
        # friends dominate; otherwise impartials; otherwise everyone else
        lonely = build_network(4, [(0, 1, "enemy"), (0, 2, "enemy"), (0, 3, "enemy"),
                                   (1, 2, "friend"), (1, 3, "friend"), (2, 3, "friend")])
        # agent 0: f=0, i=0 -> exponent n-1 = 3; agents 1..3: f=2
        q = F(1, 3)
        expect = 1 - (((1 - q) ** 3) + 3 * ((1 - q) ** 2)) / 4
        assert closed_form_prd(lonely, q) == expect

    def test_matches_exact_on_grid(self, rd_handle, k4_friend, matching4, k3_impartial):
        for net in (k4_friend, matching4, k3_impartial):
            for q in (F(1, 4), HALF, F(3, 4)):
                assert closed_form_prd(net, q) == exact_efficiency(rd_handle, net, q)

    def test_prior_condition(self, matching4, k4_friend, k3_impartial):
        assert rd_equals_prior_condition(matching4)
        assert not rd_equals_prior_condition(k4_friend)
        assert not rd_equals_prior_condition(k3_impartial)


class TestDuplesBound:
    def test_values(self):
        assert duples_sb_lower_bound(3, HALF) == F(33, 64)
        assert duples_sb_lower_bound(4, HALF) == F(13, 24)

    def test_needs_three_agents(self):
        with pytest.raises(Exception):
            duples_sb_lower_bound(2, HALF)

    def test_holds_on_hostile_cliques(self, duples_handle):
        net = build_network(
            4,
            [(0, 1, "friend"), (2, 3, "friend")]
            + [(i, j, "enemy") for i in (0, 1) for j in (2, 3)],
        )
        for q in (F(1, 4), HALF):
            assert exact_efficiency(duples_handle, net, q) >= duples_sb_lower_bound(4, q)


class TestMonteCarlo:
    def test_deterministic_and_exact_mean(self, duples_handle, k4_friend):
        a = mc_efficiency(duples_handle, k4_friend, HALF, samples=4000, seed=5)
        b = mc_efficiency(duples_handle, k4_friend, HALF, samples=4000, seed=5)
        assert a.mean == b.mean and a.half_width == b.half_width
        assert isinstance(a.mean, Fraction)
        assert a.samples == 4000 and a.seed == 5 and a.method == "normal"

    def test_close_to_truth(self, rd_handle, k4_friend):
        # the 95% interval misses ~1 seed in 20 by design; three half-widths
        # is a deterministic sanity margin for a fixed seed
        est = mc_efficiency(rd_handle, k4_friend, HALF, samples=20_000, seed=1)
        truth = F(7, 8)
        assert abs(est.mean - truth) <= 3 * est.half_width
        assert est.distinct_needy_sets == 16

    def test_thread_count_invariant(self, rd_handle, k4_friend, monkeypatch):
        base = mc_efficiency(rd_handle, k4_friend, HALF, samples=3000, seed=9)
        monkeypatch.setenv("PEERSEL_THREADS", "3")
        threaded = mc_efficiency(rd_handle, k4_friend, HALF, samples=3000, seed=9)
        assert base.mean == threaded.mean

    def test_wilson_flag(self, constant_handle, k4_friend):
        plain = mc_efficiency(constant_handle, k4_friend, HALF, samples=2000, seed=2)
        wils = mc_efficiency(
            constant_handle, k4_friend, HALF, samples=2000, seed=2, wilson=True
        )
        assert plain.mean == wils.mean
        assert wils.half_width > 0 and wils.half_width != plain.half_width

    def test_mask_width_limit(self, constant_handle):
        with pytest.raises(BudgetExceededError):
            mc_efficiency(constant_handle, build_network(64, []), HALF, samples=10, seed=0)


class TestCompare:
    def test_ranks_with_ties(self, k4_friend):
        handles = [
            MechanismHandle(MechanismKind.RD),
            MechanismHandle(MechanismKind.DUPLES),
            MechanismHandle(MechanismKind.G1),
            MechanismHandle(MechanismKind.CONSTANT),
        ]
        table = compare_mechanisms(k4_friend, HALF, handles)
        by_label = {r.mechanism: r for r in table.rows}
        assert by_label["rd"].value == F(7, 8)
        assert by_label["g1"].value == by_label["constant"].value == HALF
        assert by_label["g1"].rank == by_label["constant"].rank == 3
        assert by_label["rd"].rank == 1
        assert [r.rank for r in table.rows] == sorted(r.rank for r in table.rows)

    def test_sampled_rows_carry_half_width(self, k4_friend):
        handles = [MechanismHandle(MechanismKind.RD), MechanismHandle(MechanismKind.CONSTANT)]
        table = compare_mechanisms(k4_friend, HALF, handles, samples=2000, seed=0)
        assert all(r.half_width is not None for r in table.rows)
        assert "rank" in table.as_text() or table.as_text()
