import json
from fractions import Fraction

import pytest

from peersel import Relation, Theorem4Construction, build_network, check_structural_balance
from peersel.instances import (
    FAMILIES,
    GeneratorError,
    Instance,
    InstanceFormatError,
    generate,
    parse_instance,
    serialize_instance,
)

REMARK_TEXT = """{
  "n": 3,
  "relations": [
    [0, 2, "friend"],
    [1, 2, "friend"]
  ],
  "needy": [0]
}
"""


class TestParse:
    def test_round_trip_is_fixed_point(self):
        inst = parse_instance(REMARK_TEXT)
        assert serialize_instance(inst) == REMARK_TEXT
        assert parse_instance(serialize_instance(inst)) == inst

    def test_triples_normalized(self):
        a = parse_instance('{"n": 3, "relations": [[2, 1, "friend"]]}')
        b = parse_instance('{"n": 3, "relations": [[1, 2, "friend"]]}')
        assert a == b
        assert a.network.pairs == ((1, 2, Relation.FRIEND),)

    def test_q_is_exact(self):
        inst = parse_instance('{"n": 2, "relations": [], "q": "1/3"}')
        assert inst.q == Fraction(1, 3)
        assert '"q": "1/3"' in serialize_instance(inst)

    def test_impartial_triples_allowed_but_not_reserialized(self):
        inst = parse_instance('{"n": 3, "relations": [[0, 1, "impartial"]]}')
        assert inst.network.pairs == ()

    def test_exact_duplicate_tolerated(self):
        text = '{"n": 3, "relations": [[0, 1, "enemy"], [1, 0, "enemy"]]}'
        assert parse_instance(text).network.relation(0, 1) is Relation.ENEMY

    def test_conflicting_labels_rejected(self):
        with pytest.raises(InstanceFormatError):
            parse_instance('{"n": 3, "relations": [[0, 1, "enemy"], [0, 1, "friend"]]}')

    def test_unknown_fields_rejected(self):
        with pytest.raises(InstanceFormatError):
            parse_instance('{"n": 2, "relations": [], "color": "red"}')

    def test_bools_are_not_agent_ids(self):
        with pytest.raises(InstanceFormatError):
            parse_instance('{"n": 2, "relations": [[true, 1, "friend"]]}')

    def test_needy_range_checked(self):
        with pytest.raises(InstanceFormatError):
            parse_instance('{"n": 2, "relations": [], "needy": [5]}')

    def test_q_range_checked(self):
        with pytest.raises(InstanceFormatError):
            parse_instance('{"n": 2, "relations": [], "q": "3/2"}')

    def test_not_an_object(self):
        with pytest.raises(InstanceFormatError):
            parse_instance("[1, 2, 3]")
        with pytest.raises(InstanceFormatError):
            parse_instance("{broken")


class TestCorpus:
    def test_every_file_is_canonical(self, corpus_dir):
        files = sorted(corpus_dir.rglob("*.instance"))
        assert len(files) >= 45
        for f in files:
            text = f.read_text()
            inst = parse_instance(text)
            assert serialize_instance(inst) == text, f.name

    def test_small_networks_dominate(self, corpus_dir):
        # the exhaustive incentive sweeps need a wide bench of tiny networks
        small = [
            f
            for f in corpus_dir.rglob("*.instance")
            if parse_instance(f.read_text()).network.n <= 4
        ]
        assert len(small) >= 30


class TestFamilies:
    def test_registry(self):
        assert set(FAMILIES) == {
            "CompleteFriend",
            "CompleteEnemy",
            "CompleteImpartial",
            "MatchingFriends",
            "PaperFig1",
            "Theorem5bCliques",
            "RandomSigned",
            "RandomBalanced",
        }

    def test_complete_families(self):
        f = generate("CompleteFriend", n=4).network
        e = generate("CompleteEnemy", n=4).network
        i = generate("CompleteImpartial", n=4).network
        assert all(f.relation(a, b) is Relation.FRIEND for a in range(4) for b in range(a + 1, 4))
        assert all(e.relation(a, b) is Relation.ENEMY for a in range(4) for b in range(a + 1, 4))
        assert i.pairs == ()

    def test_matching_needs_even_n(self):
        net = generate("MatchingFriends", n=6).network
        assert net.friends_of(0) == frozenset({1})
        assert net.friends_of(4) == frozenset({5})
        with pytest.raises(GeneratorError):
            generate("MatchingFriends", n=5)

    def test_two_state_family_matches_construction(self):
        for n in (4, 5, 6):
            left, right = Theorem4Construction(n).states()
            gl = generate("PaperFig1", side="left", n=n)
            gr = generate("PaperFig1", side="right", n=n)
            assert (gl.network, gl.needy) == (left.network, left.needy)
            assert (gr.network, gr.needy) == (right.network, right.needy)

    def test_clique_blocks(self):
        inst = generate("Theorem5bCliques", x1=1, x2=2, y1=1, y2=1)
        net = inst.network
        assert net.n == 5
        assert net.friends_of(1) == frozenset({2})
        assert net.enemies_of(0) == frozenset({1, 2})

    def test_random_signed_deterministic(self):
        a = generate("RandomSigned", n=5, p_f="1/3", p_e="1/3", seed=7)
        b = generate("RandomSigned", n=5, p_f="1/3", p_e="1/3", seed=7)
        c = generate("RandomSigned", n=5, p_f="1/3", p_e="1/3", seed=8)
        assert a == b
        assert a != c

    def test_random_signed_probability_bounds(self):
        with pytest.raises(GeneratorError):
            generate("RandomSigned", n=4, p_f="2/3", p_e="2/3", seed=0)

    def test_balanced_explicit_layout(self):
        inst = generate(
            "RandomBalanced", clique_sizes=[2, 1, 1], pairing=[[0, 2]]
        )
        net = inst.network
        assert net.n == 4
        assert net.friends_of(0) == frozenset({1})
        assert net.enemies_of(0) == frozenset({3})
        assert net.enemies_of(2) == frozenset()
        assert check_structural_balance(net).balanced

    def test_balanced_sampled_deterministic(self):
        a = generate("RandomBalanced", n=6, seed=12)
        b = generate("RandomBalanced", n=6, seed=12)
        assert a == b

    def test_unknown_family(self):
        with pytest.raises(GeneratorError):
            generate("Erdos", n=4)

    def test_extra_params_rejected(self):
        with pytest.raises(GeneratorError):
            generate("CompleteFriend", n=4, extra=1)


class TestInstanceObject:
    def test_world_state_requires_needy(self):
        inst = generate("CompleteFriend", n=3)
        with pytest.raises(Exception):
            inst.world_state()
        inst2 = Instance(inst.network, needy=frozenset({1}))
        assert inst2.world_state().needy == frozenset({1})

    def test_serialized_shape_is_compact(self):
        inst = generate("CompleteFriend", n=3)
        text = serialize_instance(inst)
        data = json.loads(text)
        assert data["n"] == 3
        # one relation triple per line keeps diffs readable
        triple_lines = [ln.strip() for ln in text.splitlines() if ln.strip().startswith("[0, 1")]
        assert triple_lines == ['[0, 1, "friend"],']
        assert sum(1 for ln in text.splitlines() if ln.strip().startswith("[")) == len(
            data["relations"]
        )
