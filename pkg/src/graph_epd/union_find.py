from dataclasses import dataclass

import numpy as np


@dataclass
class OpStats:
    """Union-find operation counters, summed over every structure that shares them."""
    finds: int = 0
    unions: int = 0

    @property
    def total(self):
        return self.finds + self.unions

    def add(self, other):
        self.finds += other.finds
        self.unions += other.unions


class UnionFind:
    """
    Disjoint sets over elements 0..n-1 with path compression.

    ``order`` gives each element's position in the processing order; the root
    of a set is always its earliest element (the minimum-value element of the
    component), so a union keeps the older root and reports the younger one.

    Examples
    --------
    >>> uf = UnionFind([0, 1, 2])
    >>> uf.union(2, 1)
    (1, 2)
    >>> uf.find(2)
    1
    """

    def __init__(self, order, stats=None):
        self.order = np.asarray(order)
        self.parent = list(range(len(self.order)))
        self.stats = stats if stats is not None else OpStats()

    def find(self, x):
        self.stats.finds += 1
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union_roots(self, rx, ry):
        """Merge two distinct roots; returns (survivor, loser)."""
        self.stats.unions += 1
        if self.order[ry] < self.order[rx]:
            rx, ry = ry, rx
        self.parent[ry] = rx
        return rx, ry

    def union(self, x, y):
        """Merge the sets of x and y; None when they already share a root."""
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return None
        return self.union_roots(rx, ry)
