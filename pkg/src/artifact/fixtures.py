"""Shipped mock inputs: c.e. schedules, adversary configs and small trees.

The acceptance suite and the CLI's defaults both read from here, so a
number changed in one place changes everywhere.
"""

from __future__ import annotations

import random
from typing import Optional

from .oracles import ApproxStack, CeFamily, MockCeSet
from .trees import FiniteTree, StagewiseTree, chain, star

# K for the staircase round trip: five elements, the last entering late.
STAIRCASE_K = ((1, 7), (0, 12), (3, 30), (2, 41), (4, 150))

# K for the single-path round trip.
SINGLEPATH_K = ((2, 9), (4, 14), (1, 22), (6, 31), (3, 40))

# K paired with every approximation-stack family.
STACK_K = ((0, 2), (3, 5), (1, 9))

# (finite sets: stages, periodic sets: (offset, period))
FAMILIES = {
    "a": ({0: [4], 2: [3, 7], 4: [10]}, {1: (1, 4), 3: (2, 6)}),
    "b": ({0: [2, 6], 1: [], 2: [9], 3: [1], 4: [15]}, {}),
    "c": ({1: [4, 20], 3: [12]}, {0: (1, 2), 2: (2, 8), 4: (6, 8)}),
}

ISOMAXINF_CONFIG = """\
pair <0,0> tree=mirror delay=2 map=shift shift=1
pair <0,1> tree=mirror delay=2 map=shift shift=2
pair <1,0> tree=tall map=identity
"""

PUMP_CONFIG = """\
pair <0,0> tree=pump start=2 map=shift shift=1
pair <0,1> tree=mirror delay=2 map=shift shift=1
"""

CAC_CONFIG = """\
enum 0 w=branch side=left
enum 1 w=leaves
enum 2 w=empty
enum 3 w=branch side=right
enum 4 w=newest
enum 5 w=leaves start=100
"""


def k_set(name: str) -> MockCeSet:
    table = {"staircase": STAIRCASE_K, "singlepath": SINGLEPATH_K, "stack": STACK_K}
    return MockCeSet(table[name])


def family(name: str) -> CeFamily:
    finite, periodic = FAMILIES[name]
    return CeFamily(finite, periodic)


def stack(name: str = "a", n_max: int = 4) -> ApproxStack:
    return ApproxStack(family(name), k_set("stack"), n_max)


def isomaxinf_pairs(config: str = ISOMAXINF_CONFIG) -> list:
    from .adversary.programs import parse_config

    return parse_config(config).pairs


def cac_enumerators(config: str = CAC_CONFIG) -> list:
    from .adversary.programs import parse_config

    return parse_config(config).enums


def leafy(n_leaves: int = 40) -> StagewiseTree:
    """A star whose leaves all arrive at stage 0, padded with empty stages."""
    p = StagewiseTree.from_tree(star(n_leaves))
    for _ in range(10):
        p.new_stage()
    return p


def leafless(length: int = 40) -> StagewiseTree:
    """A chain growing by one node per stage: its only leaf is always new."""
    p = StagewiseTree()
    p.add(0, None)
    for i in range(1, length):
        p.new_stage()
        p.add(i, i - 1)
    return p


def random_tree(rng: random.Random, max_nodes: int) -> FiniteTree:
    """Uniform size in 1..max_nodes, each node attached to a uniform earlier node."""
    n = rng.randint(1, max_nodes)
    return FiniteTree({i: (None if i == 0 else rng.randrange(i)) for i in range(n)})


def random_sequence(seed: int, length: int = 50, max_nodes: int = 6) -> list[FiniteTree]:
    rng = random.Random(seed)
    return [random_tree(rng, max_nodes) for _ in range(length)]


def chain_sequence(length: int = 50) -> list[FiniteTree]:
    return [chain(i + 1) for i in range(length)]


def star_prefixed(length: int = 50, star_size: int = 10) -> list[FiniteTree]:
    return [star(star_size)] + [chain(i + 1) for i in range(length - 1)]


def tree_named(name: str, size: Optional[int] = None) -> FiniteTree:
    """``chain-5``, ``star-10`` style names."""
    kind, _, n = name.partition("-")
    size = int(n) if n else (size or 1)
    if kind == "chain":
        return chain(size)
    if kind == "star":
        return star(size)
    raise KeyError(name)
