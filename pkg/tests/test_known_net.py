from fractions import Fraction

import pytest

from peersel import (
    IntersectionKind,
    MessageProfile,
    Mode,
    ModeMismatchError,
    PeerselError,
    PositiveVoteQuery,
    RelationSelector,
    WorldState,
    build_network,
    check_intersection,
    mechanism_g1,
    mechanism_g2k,
    mechanism_g3k,
    positive_vote_set,
    truthful_profile,
)
from peersel.known_net import g2k_evaluator, g3k_evaluator


def needy_profile(n, *reported):
    """reported[i] is the needy set agent i announces."""
    from peersel.model import NeedySetMessage

    return MessageProfile(
        Mode.NEEDY_ONLY,
        tuple(NeedySetMessage(i, frozenset(reported[i])) for i in range(n)),
    )


class TestPositiveVotes:
    def test_unanimity_among_qualifying_voters(self, remark):
        prof = needy_profile(3, {0}, {0}, {0})
        # impartial voters: agent 0's only impartial is 1, who reports 0 needy
        out = positive_vote_set(
            remark, prof, PositiveVoteQuery(frozenset({1}), RelationSelector.IMPARTIAL_OF)
        )
        assert 0 in out

    def test_vacuous_approval_when_no_voter_qualifies(self, remark):
        prof = needy_profile(3, set(), set(), set())
        out = positive_vote_set(
            remark, prof, PositiveVoteQuery(frozenset({0}), RelationSelector.IMPARTIAL_OF)
        )
        # agent 2 has no impartials at all -> approved by anyone's messages
        assert 2 in out

    def test_one_dissent_blocks(self, remark):
        prof = needy_profile(3, {2}, set(), {2})
        out = positive_vote_set(
            remark,
            prof,
            PositiveVoteQuery(frozenset({0, 1}), RelationSelector.IMPARTIAL_OF),
        )
        assert 0 not in out  # voter 1 is impartial to 0 and did not report 0

    def test_wrong_mode_rejected(self, remark):
        prof = truthful_profile(WorldState(remark, frozenset()), Mode.FULL_TYPE)
        with pytest.raises(ModeMismatchError):
            positive_vote_set(
                remark, prof, PositiveVoteQuery(frozenset(), RelationSelector.IMPARTIAL_OF)
            )


class TestG1:
    def test_remark_values(self, remark):
        prof = truthful_profile(WorldState(remark, frozenset({0})), Mode.NEEDY_ONLY)
        dist = mechanism_g1(remark, prof)
        assert tuple(dist) == (Fraction(1, 3), Fraction(0), Fraction(1, 3))

    def test_complete_impartial_splits_over_reported(self):
        net = build_network(4, [])
        prof = truthful_profile(WorldState(net, frozenset({1, 2})), Mode.NEEDY_ONLY)
        dist = mechanism_g1(net, prof)
        assert tuple(dist) == (0, Fraction(1, 2), Fraction(1, 2), 0)

    def test_mass_can_be_wasted(self, remark):
        prof = truthful_profile(WorldState(remark, frozenset({0})), Mode.NEEDY_ONLY)
        assert mechanism_g1(remark, prof).total() == Fraction(2, 3)


class TestSinkMechanisms:
    def test_g2k_routes_to_reported_needy(self, k4_enemy):
        prof = truthful_profile(WorldState(k4_enemy, frozenset({1})), Mode.NEEDY_ONLY)
        dist = mechanism_g2k(k4_enemy, 3, prof)
        assert tuple(dist) == (0, 1, 0, 0)

    def test_g2k_sink_takes_residual_when_nobody_reported(self, k4_enemy):
        prof = truthful_profile(WorldState(k4_enemy, frozenset()), Mode.NEEDY_ONLY)
        dist = mechanism_g2k(k4_enemy, 3, prof)
        assert tuple(dist) == (0, 0, 0, 1)

    def test_g2k_splits_among_all_reported(self, k4_enemy):
        prof = truthful_profile(
            WorldState(k4_enemy, frozenset({0, 1, 2})), Mode.NEEDY_ONLY
        )
        dist = mechanism_g2k(k4_enemy, 3, prof)
        third = Fraction(1, 3)
        assert tuple(dist) == (third, third, third, 0)

    def test_g3k_on_friend_clique(self, k4_friend):
        prof = truthful_profile(WorldState(k4_friend, frozenset({0})), Mode.NEEDY_ONLY)
        dist = mechanism_g3k(k4_friend, 0, prof)
        assert tuple(dist) == (1, 0, 0, 0)

    def test_total_mass_always_one(self, k4_enemy):
        ev = g2k_evaluator(k4_enemy, 2)
        for a in range(16):
            for b in range(16):
                prof = needy_profile(
                    4,
                    {i for i in range(4) if (a >> i) & 1},
                    {i for i in range(4) if (b >> i) & 1},
                    {0, 1},
                    set(),
                )
                assert sum(ev.probs(prof.messages), Fraction(0)) == 1

    def test_sink_out_of_range(self, k4_enemy):
        with pytest.raises(PeerselError):
            g3k_evaluator(k4_enemy, 7)

    def test_wrong_mode_rejected(self, k4_enemy):
        prof = truthful_profile(WorldState(k4_enemy, frozenset()), Mode.FULL_TYPE)
        with pytest.raises(ModeMismatchError):
            mechanism_g2k(k4_enemy, 3, prof)


class TestIntersectionConditions:
    def test_impartial_condition(self, remark):
        net = build_network(4, [])
        assert check_intersection(net, IntersectionKind.IMPARTIAL).satisfied
        verdict = check_intersection(remark, IntersectionKind.IMPARTIAL)
        assert not verdict.satisfied
        assert verdict.witness == (0, 1)

    def test_enemy_condition_needs_sink(self, k4_enemy):
        assert check_intersection(k4_enemy, IntersectionKind.ENEMY, k=3).satisfied
        with pytest.raises(PeerselError):
            check_intersection(k4_enemy, IntersectionKind.ENEMY)
        with pytest.raises(PeerselError):
            check_intersection(k4_enemy, IntersectionKind.IMPARTIAL, k=3)

    def test_friend_condition(self, k4_friend, matching4):
        assert check_intersection(k4_friend, IntersectionKind.FRIEND, k=0).satisfied
        verdict = check_intersection(matching4, IntersectionKind.FRIEND, k=0)
        assert not verdict.satisfied

    def test_empty_own_pool_fails_condition(self):
        # a lone candidate with no enemies is approved vacuously, so the
        # condition must fail even though there is no pair of distinct
        # candidates to compare — the self pair (0, 0) is the witness
        pair = build_network(2, [(0, 1, "friend")])
        verdict = check_intersection(pair, IntersectionKind.ENEMY, k=1)
        assert not verdict.satisfied
        assert verdict.witness == (0, 0)
        # same agent-versus-herself reading for the impartial condition
        solo = build_network(4, [(0, 1, "friend"), (0, 2, "friend"), (0, 3, "friend")])
        v2 = check_intersection(solo, IntersectionKind.IMPARTIAL)
        assert not v2.satisfied
        assert v2.witness == (0, 0)
