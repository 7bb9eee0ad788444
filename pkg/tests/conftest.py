from pathlib import Path

import pytest

from peersel import MechanismHandle, MechanismKind, build_network

CORPUS = Path(__file__).resolve().parent.parent / "corpus"

# one line per acceptance criterion, echoed after the test summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def corpus_dir() -> Path:
    return CORPUS


@pytest.fixture(scope="session")
def remark():
    """Three agents: 2 befriends both others, 0 and 1 are mutually impartial."""
    return build_network(3, [(0, 2, "friend"), (1, 2, "friend")])


@pytest.fixture(scope="session")
def k4_friend():
    return build_network(4, [(i, j, "friend") for i in range(4) for j in range(i + 1, 4)])


@pytest.fixture(scope="session")
def k4_enemy():
    return build_network(4, [(i, j, "enemy") for i in range(4) for j in range(i + 1, 4)])


@pytest.fixture(scope="session")
def k3_impartial():
    return build_network(3, [])


@pytest.fixture(scope="session")
def matching4():
    return build_network(4, [(0, 1, "friend"), (2, 3, "friend")])


@pytest.fixture(scope="session")
def rd_handle():
    return MechanismHandle(MechanismKind.RD)


@pytest.fixture(scope="session")
def duples_handle():
    return MechanismHandle(MechanismKind.DUPLES)


@pytest.fixture(scope="session")
def constant_handle():
    return MechanismHandle(MechanismKind.CONSTANT)


@pytest.fixture(scope="session")
def g1_handle():
    return MechanismHandle(MechanismKind.G1)


def broken_g1_handle() -> MechanismHandle:
    """A g1 lookalike that (wrongly) lets agents vote on their own membership."""
    from peersel.known_net import _NeedyVoteEvaluator, _lcm_upto

    def factory(network, n):
        sets = tuple(network.impartials_of(i) | {i} for i in range(network.n))
        return _NeedyVoteEvaluator(
            label="g1-selfvote",
            n=network.n,
            member_voters=sets,
            denom_voters=sets,
            rival_sets=sets,
            candidates=tuple(range(network.n)),
            excluded_rival=None,
            sink=None,
            scale=_lcm_upto(network.n),
        )

    return MechanismHandle(MechanismKind.EXTERNAL, factory=factory, ext_label="g1-selfvote")
