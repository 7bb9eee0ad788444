import random
from fractions import Fraction

import numpy as np
import pytest

from peersel import (
    BudgetExceededError,
    Exhaustive,
    FullTypeSpace,
    MechanismHandle,
    MechanismKind,
    Mode,
    NeedyOnlySpace,
    PeerselError,
    Sampled,
    build_network,
    check_dsic,
    check_efficiency,
    check_validity,
    reference_dsic,
    space_for,
)
from peersel.known_net import g1_evaluator, g2k_evaluator, g3k_evaluator
from peersel.unknown_net import duples_evaluator, rd_evaluator

from conftest import broken_g1_handle


def violation_keys(space, report):
    return sorted(
        (v.agent, space.profile_ids(v.base), space.id_of(v.deviation))
        for v in report.violations
    )


class TestSpaces:
    def test_needy_only_ids(self):
        space = NeedyOnlySpace(3)
        assert space.sizes == (8, 8, 8)
        assert space.profile_count == 512
        for a in range(3):
            for mid in range(8):
                assert space.id_of(space.message(a, mid)) == mid

    def test_full_type_ids(self):
        space = FullTypeSpace(3)
        assert space.sizes == (72, 72, 72)
        for a in range(3):
            for mid in range(0, 72, 7):
                msg = space.message(a, mid)
                assert msg.reporter == a
                assert space.id_of(msg) == mid

    def test_profile_round_trip(self):
        space = space_for(Mode.FULL_TYPE, 3)
        prof = space.profile_from_ids((5, 71, 0))
        assert space.profile_ids(prof) == (5, 71, 0)

    def test_space_for_dispatch(self):
        assert isinstance(space_for(Mode.NEEDY_ONLY, 4), NeedyOnlySpace)
        assert isinstance(space_for(Mode.FULL_TYPE, 2), FullTypeSpace)


class TestBatchAgreesWithPointwise:
    """The vectorized lattice route must match per-profile Fraction evaluation."""

    def _compare(self, ev, n, rows=150, seed=7):
        space = space_for(ev.mode, n)
        batch = ev.batch_for(space)
        if batch is None:
            pytest.skip(f"{ev.label} has no vectorized route")
        rng = random.Random(seed)
        ids = np.array(
            [[rng.randrange(space.sizes[a]) for a in range(n)] for _ in range(rows)],
            dtype=np.int64,
        )
        got = batch(ids)
        for r in range(rows):
            prof = space.profile_from_ids(ids[r])
            exact = ev.probs(prof.messages)
            assert [Fraction(int(g), ev.scale) for g in got[r]] == list(exact)

    def test_g1(self, remark):
        self._compare(g1_evaluator(remark), 3)

    def test_g2k(self, k4_enemy):
        self._compare(g2k_evaluator(k4_enemy, 3), 4)

    def test_g3k(self, k4_friend):
        self._compare(g3k_evaluator(k4_friend, 0), 4)

    def test_rd(self):
        self._compare(rd_evaluator(3), 3)

    def test_duples(self):
        self._compare(duples_evaluator(3), 3)


class TestEngineAgainstReference:
    """The optimized incentive sweep must reproduce the naive one exactly."""

    def test_g1_clean(self, remark, g1_handle):
        fast = check_dsic(g1_handle, remark)
        slow = reference_dsic(g1_handle, remark)
        assert fast.passed and slow.passed
        assert fast.bases_checked == slow.bases_checked == 512

    def test_sinked_mechanisms_clean(self, remark):
        for kind in (MechanismKind.G2K, MechanismKind.G3K):
            handle = MechanismHandle(kind, sink=2)
            fast = check_dsic(handle, remark)
            slow = reference_dsic(handle, remark)
            assert fast.passed and slow.passed, handle.label

    def test_broken_g1_same_violations(self, remark):
        handle = broken_g1_handle()
        fast = check_dsic(handle, remark, max_violations=5000)
        slow = reference_dsic(handle, remark, max_violations=5000)
        assert not fast.passed
        assert fast.total_violations == slow.total_violations > 0
        space = space_for(Mode.NEEDY_ONLY, 3)
        assert violation_keys(space, fast) == violation_keys(space, slow)

    def test_rd_small(self, rd_handle):
        fast = check_dsic(rd_handle, n=2)
        slow = reference_dsic(rd_handle, n=2)
        assert fast.passed and slow.passed
        assert fast.bases_checked == slow.bases_checked

    def test_duples_small(self, duples_handle):
        fast = check_dsic(duples_handle, n=2)
        slow = reference_dsic(duples_handle, n=2)
        assert fast.passed and slow.passed


class TestSampledStrategy:
    def test_deterministic(self, rd_handle):
        a = check_dsic(rd_handle, strategy=Sampled(count=50, seed=11), n=3)
        b = check_dsic(rd_handle, strategy=Sampled(count=50, seed=11), n=3)
        assert a.passed and b.passed
        assert a.bases_checked == b.bases_checked == 50
        assert a.deviations_checked == b.deviations_checked
        assert not a.exhaustive

    def test_catches_broken_mechanism(self, remark):
        rep = check_dsic(
            broken_g1_handle(), remark, strategy=Sampled(count=200, seed=0)
        )
        assert not rep.passed

    def test_matches_reference_on_same_bases(self, remark):
        handle = broken_g1_handle()
        space = space_for(Mode.NEEDY_ONLY, 3)
        sampled = check_dsic(
            handle, remark, strategy=Sampled(count=40, seed=3), max_violations=5000
        )
        bases = sorted({space.profile_ids(v.base) for v in sampled.violations})
        slow = reference_dsic(handle, remark, bases=bases, max_violations=5000)
        assert violation_keys(space, slow) == sorted(
            set(violation_keys(space, sampled))
        )


class TestBudgets:
    def test_exhaustive_budget(self, rd_handle):
        with pytest.raises(BudgetExceededError):
            check_dsic(rd_handle, strategy=Exhaustive(budget=1000), n=3)

    def test_needy_mechanism_requires_network(self, g1_handle):
        with pytest.raises(PeerselError):
            check_dsic(g1_handle, n=3)


class TestValidity:
    def test_g1_never_exceeds_one(self, remark, g1_handle):
        rep = check_validity(g1_handle, remark)
        assert rep.passed
        assert rep.checked == 512
        assert rep.max_total <= 1

    def test_sinked_total_exactly_one(self, remark):
        rep = check_validity(MechanismHandle(MechanismKind.G2K, sink=2), remark)
        assert rep.passed
        assert rep.max_total == 1

    def test_explicit_profiles(self, k3_impartial, constant_handle):
        from peersel import WorldState, truthful_profile

        profs = [
            truthful_profile(WorldState(k3_impartial, frozenset({i})), Mode.FULL_TYPE)
            for i in range(3)
        ]
        rep = check_validity(constant_handle, profiles=profs, n=3)
        assert rep.passed and rep.checked == 3


class TestEfficiency:
    def test_friend_clique_with_sink_passes(self, k4_friend):
        rep = check_efficiency(MechanismHandle(MechanismKind.G3K, sink=0), k4_friend)
        assert rep.passed
        assert rep.checked == 15

    def test_g1_fails_without_impartial_cover(self, remark, g1_handle):
        rep = check_efficiency(g1_handle, remark)
        assert not rep.passed
        assert rep.failing_mass < 1

    def test_g1_passes_on_all_impartial(self, k3_impartial, g1_handle):
        # every agent's membership is judged by two impartials, so every
        # needy agent is selected whenever anyone is needy at all
        rep = check_efficiency(g1_handle, k3_impartial)
        assert rep.passed
