"""k-uniform hypergraphs with incidence index, degree and co-degree statistics."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations

import numpy as np


class BudgetError(RuntimeError):
    """An enumeration or pair scan would exceed its configured budget."""


class InfeasibleError(RuntimeError):
    """The requested parameters admit no valid construction."""


class Hypergraph:
    """Immutable k-uniform hypergraph on vertex ids 0..n-1.

    ``edges`` is a lexicographically sorted tuple of strictly increasing
    k-tuples with no duplicates; ``incidence[v]`` lists the ids of the edges
    containing v.  Instances are safe to share across worker threads.
    """

    def __init__(self, n: int, k: int, edges):
        if k < 1:
            raise ValueError(f"uniformity k must be >= 1, got {k}")
        if n < 1:
            raise ValueError(f"vertex count must be >= 1, got {n}")
        canonical = []
        for raw in edges:
            edge = tuple(sorted(raw))
            if len(edge) != k or len(set(edge)) != k:
                raise ValueError(f"edge {tuple(raw)} does not have {k} distinct vertices")
            if edge[0] < 0 or edge[-1] >= n:
                raise ValueError(f"edge {edge} has a vertex id outside [0, {n})")
            canonical.append(edge)
        canonical.sort()
        for prev, cur in zip(canonical, canonical[1:]):
            if prev == cur:
                raise ValueError(f"duplicate edge {cur}")
        self.n = int(n)
        self.k = int(k)
        self.edges = tuple(canonical)
        self.m = len(canonical)
        incidence = [[] for _ in range(n)]
        for idx, edge in enumerate(canonical):
            for v in edge:
                incidence[v].append(idx)
        self.incidence = tuple(tuple(lst) for lst in incidence)
        arr = np.array(canonical, dtype=np.int64) if canonical else np.empty((0, k), dtype=np.int64)
        arr.setflags(write=False)
        self.edges_arr = arr

    def __eq__(self, other):
        return (
            isinstance(other, Hypergraph)
            and self.n == other.n
            and self.k == other.k
            and self.edges == other.edges
        )

    def __hash__(self):
        return hash((self.n, self.k, self.edges))

    def __repr__(self):
        return f"Hypergraph(n={self.n}, m={self.m}, k={self.k})"

    @cached_property
    def pair_index(self) -> "PairIndex":
        """Index of all vertex pairs that co-occur in at least one edge."""
        if self.k < 2 or self.m == 0:
            empty = np.empty(0, dtype=np.int64)
            ids = np.empty((self.m, 0), dtype=np.int64)
            return PairIndex(count=0, u=empty, v=empty, edge_pair_ids=ids)
        cols = list(combinations(range(self.k), 2))
        lo = np.stack([self.edges_arr[:, i] for i, _ in cols], axis=1)
        hi = np.stack([self.edges_arr[:, j] for _, j in cols], axis=1)
        codes = lo * self.n + hi
        uniq, inverse = np.unique(codes, return_inverse=True)
        ids = inverse.reshape(codes.shape).astype(np.int64)
        for a in (uniq, ids):
            a.setflags(write=False)
        u = (uniq // self.n).astype(np.int64)
        v = (uniq % self.n).astype(np.int64)
        u.setflags(write=False)
        v.setflags(write=False)
        return PairIndex(count=len(uniq), u=u, v=v, edge_pair_ids=ids)


@dataclass(frozen=True)
class PairIndex:
    """Co-occurring vertex pairs of a hypergraph.

    ``edge_pair_ids[e, j]`` is the dense id of the j-th vertex pair inside
    edge e; ``u``/``v`` give the endpoints of each dense pair id.
    """

    count: int
    u: np.ndarray
    v: np.ndarray
    edge_pair_ids: np.ndarray


@dataclass(frozen=True)
class DegreeProfile:
    """Per-vertex degrees plus extremal degree/co-degree statistics."""

    deg: np.ndarray
    max_degree: int
    min_degree: int
    max_codegree: int


@dataclass(frozen=True)
class HypergraphStats:
    """The scalar statistics consumed by the analytic bound evaluators."""

    n: int
    m: int
    k: int
    max_degree: int
    min_degree: int
    max_codegree: int


def validate(edges, n: int, k: int) -> Hypergraph:
    """Build a hypergraph from a raw edge list, rejecting malformed input.

    Edges of the wrong cardinality, vertex ids outside [0, n) and duplicate
    edges (after canonical sorting) are all hard errors.
    """
    return Hypergraph(n=n, k=k, edges=edges)


def degree_profile(H: Hypergraph) -> DegreeProfile:
    """Compute degrees, max/min degree and the maximum co-degree of H.

    The co-degree maximum scans only pairs that co-occur inside some edge;
    all other pairs have co-degree 0.
    """
    deg = np.bincount(H.edges_arr.ravel(), minlength=H.n) if H.m else np.zeros(H.n, dtype=np.int64)
    deg = deg.astype(np.int64)
    deg.setflags(write=False)
    pairs = H.pair_index
    if pairs.count:
        codeg = np.bincount(pairs.edge_pair_ids.ravel(), minlength=pairs.count)
        max_codeg = int(codeg.max())
    else:
        max_codeg = 0
    return DegreeProfile(
        deg=deg,
        max_degree=int(deg.max()) if H.n else 0,
        min_degree=int(deg.min()) if H.n else 0,
        max_codegree=max_codeg,
    )


def codegree(H: Hypergraph, u: int, v: int) -> int:
    """Number of edges containing both u and v (u != v)."""
    if u == v:
        raise ValueError("co-degree is defined for distinct vertices")
    for w in (u, v):
        if not 0 <= w < H.n:
            raise ValueError(f"vertex id {w} outside [0, {H.n})")
    return len(set(H.incidence[u]).intersection(H.incidence[v]))


def stats_of(H: Hypergraph, profile: DegreeProfile | None = None) -> HypergraphStats:
    """Bundle (n, m, k) with the degree profile extremes."""
    if profile is None:
        profile = degree_profile(H)
    return HypergraphStats(
        n=H.n,
        m=H.m,
        k=H.k,
        max_degree=profile.max_degree,
        min_degree=profile.min_degree,
        max_codegree=profile.max_codegree,
    )
