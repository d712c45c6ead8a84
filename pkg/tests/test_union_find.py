import numpy as np
from hypothesis import given, settings, strategies as st

from graph_epd.union_find import OpStats, UnionFind


def test_root_is_earliest_element():
    uf = UnionFind([2, 0, 1])
    assert uf.union(0, 2) == (2, 0)
    assert uf.union(1, 0) == (1, 2)
    assert {uf.find(x) for x in range(3)} == {1}


def test_union_of_joined_sets():
    uf = UnionFind([0, 1])
    uf.union(0, 1)
    assert uf.union(1, 0) is None


def test_stats_are_shared():
    stats = OpStats()
    a, b = UnionFind([0, 1], stats), UnionFind([0, 1], stats)
    a.union(0, 1)
    b.find(1)
    assert stats.unions == 1
    assert stats.finds == 3
    other = OpStats(finds=2, unions=1)
    stats.add(other)
    assert stats.total == 7


@settings(derandomize=True, max_examples=100)
@given(st.lists(st.tuples(st.integers(0, 11), st.integers(0, 11)), max_size=30))
def test_matches_naive_partition(pairs):
    order = np.random.default_rng(len(pairs)).permutation(12)
    uf = UnionFind(order)
    label = list(range(12))
    for x, y in pairs:
        uf.union(x, y)
        old, new = label[y], label[x]
        label = [new if l == old else l for l in label]
    for x in range(12):
        for y in range(12):
            assert (uf.find(x) == uf.find(y)) == (label[x] == label[y])
    for x in range(12):
        members = [y for y in range(12) if label[y] == label[x]]
        assert uf.find(x) == min(members, key=lambda y: order[y])
