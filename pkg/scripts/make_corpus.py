#!/usr/bin/env python3
"""Regenerate the golden instance corpus under corpus/.

Deterministic: every file is produced by a named generator family (or is one
of the hand-written cases) so re-running this script reproduces the tree
byte-for-byte.
"""

from __future__ import annotations

from pathlib import Path

from peersel.instances import Instance, generate, serialize_instance
from peersel.model import build_network

ROOT = Path(__file__).resolve().parent.parent / "corpus"


def put(family: str, name: str, inst: Instance) -> None:
    path = ROOT / family / f"{name}.instance"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(serialize_instance(inst))
    print(path.relative_to(ROOT.parent))


def main() -> None:
    # hand-written cases
    put("cases", "remark", Instance(build_network(3, [(0, 2, "friend"), (1, 2, "friend")])))

    for n in (3, 4, 6, 8):
        put("CompleteFriend", f"k{n}", generate("CompleteFriend", n=n))
    for n in (3, 5):
        put("CompleteEnemy", f"k{n}", generate("CompleteEnemy", n=n))
    put("CompleteEnemy", "k4enemy", generate("CompleteEnemy", n=4))
    for n in (3, 4, 7):
        put("CompleteImpartial", f"k{n}", generate("CompleteImpartial", n=n))
    for n in (2, 4, 6, 8):
        put("MatchingFriends", f"m{n}", generate("MatchingFriends", n=n))

    put("PaperFig1", "left4", generate("PaperFig1", side="left", n=4))
    put("PaperFig1", "right4", generate("PaperFig1", side="right", n=4))

    put("Theorem5bCliques", "two_ef", generate("Theorem5bCliques", x1=1, x2=1, y1=1, y2=1))
    put("Theorem5bCliques", "blocks2112", generate("Theorem5bCliques", x1=2, x2=1, y1=1, y2=2))

    for seed in range(6):
        put("RandomSigned", f"n3_s{seed}",
            generate("RandomSigned", n=3, p_f="1/3", p_e="1/3", seed=seed))
    for seed in range(17):
        put("RandomSigned", f"n4_s{seed}",
            generate("RandomSigned", n=4, p_f="1/3", p_e="1/3", seed=seed))
    put("RandomSigned", "n6_s0", generate("RandomSigned", n=6, p_f="1/4", p_e="1/4", seed=0))

    for n in range(3, 9):
        put("RandomBalanced", f"b{n}_s{n}", generate("RandomBalanced", n=n, seed=n))


if __name__ == "__main__":
    main()
