"""Rooted pattern graphs, balancedness, and extension counts over sampled graphs.

A rooted graph fixes root labels; an extension embeds the non-root part into
a sampled graph so that the pattern's adjacencies to the roots and inside the
non-root part are reproduced.  Edges inside the root set are never inspected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations, permutations
from math import comb

import numpy as np

from .bounds import NicenessParams
from .core import BudgetError, InfeasibleError
from .generators import GraphSpec, pair_rank, subgraph_hypergraph
from .montecarlo import LANE_EXTENSION, TrialConfig, clopper_pearson
from .rng import TrialStream

BALANCE_BUDGET = 20


@dataclass(frozen=True)
class RootedGraph:
    """A labeled graph with roots 0..r-1 and non-roots r..r+s-1.

    ``edges`` are sorted label pairs.  ``t`` counts the edges not induced by
    the root set and the density is t / s.
    """

    vertex_count: int
    root_count: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self):
        if self.root_count < 1 or self.vertex_count <= self.root_count:
            raise ValueError("need at least one root and one non-root vertex")
        for a, b in self.edges:
            if not (0 <= a < b < self.vertex_count):
                raise ValueError(f"edge ({a}, {b}) is not a sorted pair of vertex labels")

    @property
    def s(self) -> int:
        return self.vertex_count - self.root_count

    @property
    def t(self) -> int:
        r = self.root_count
        return sum(1 for a, b in self.edges if b >= r)

    @property
    def density(self) -> float:
        return self.t / self.s

    def has_edge(self, a: int, b: int) -> bool:
        return (min(a, b), max(a, b)) in self.edges


@dataclass(frozen=True)
class RootEmbedding:
    """Distinct host-graph vertices carrying the root labels, in label order."""

    vertices: tuple[int, ...]

    def __post_init__(self):
        if len(set(self.vertices)) != len(self.vertices):
            raise ValueError("root embedding vertices must be distinct")


@dataclass(frozen=True)
class GraphSample:
    """A sampled graph on N vertices as a bitmap over K_N edge ids."""

    N: int
    kept: np.ndarray

    def has_edge(self, a: int, b: int) -> bool:
        return bool(self.kept[pair_rank(a, b)])


@dataclass(frozen=True)
class ExtensionCount:
    """Extension counts for one rooted graph, root embedding and sample.

    ``z_sets`` counts non-root vertex sets admitting at least one valid
    labeling, ``z_labeled`` counts the labelings, and ``z_subgraphs`` counts
    the distinct embedded edge sets; for complete patterns all labelings of a
    set produce the same edge set, so z_labeled = z_sets * s!.
    """

    z_sets: int
    z_labeled: int
    z_subgraphs: int
    induced: bool
    sample: "GraphSample | None" = None


def rooted_graph(vertex_count: int, root_count: int, edges) -> RootedGraph:
    """Build a rooted graph from arbitrary (sorted or not) vertex pairs."""
    canon = frozenset((min(a, b), max(a, b)) for a, b in edges)
    return RootedGraph(vertex_count=vertex_count, root_count=root_count, edges=canon)


def build_rooted(spec: GraphSpec, root_count: int) -> RootedGraph:
    """Root a pattern graph at an edge (2 roots) or an edge plus one fixed
    neighbour of the first root (3 roots).

    With 2 roots the pattern needs at least 3 vertices, with 3 roots at least
    4 (the non-root part must be nonempty).  For bipartite patterns the third
    root is canonically taken from the second root's side.
    """
    if root_count not in (2, 3):
        raise ValueError("root_count must be 2 or 3")
    if spec.v_g < root_count + 1:
        raise ValueError(f"{spec.label} has too few vertices for {root_count} roots")
    if spec.family == "complete":
        r = spec.parts[0]
        order = list(range(r))
    else:
        a, b = spec.parts
        left = [("L", i) for i in range(a)]
        right = [("R", i) for i in range(b)]
        # roots: one endpoint per side, then (for 3 roots) the next vertex on
        # the second root's side, i.e. a neighbour of the first root
        order = [left[0], right[0]]
        if root_count == 3:
            if b < 2:
                raise ValueError(f"{spec.label} has no third root adjacent to the first")
            order.append(right[1])
        order += [v for v in left + right if v not in order]
    relabel = {v: i for i, v in enumerate(order)}
    edges = set()
    if spec.family == "complete":
        for x, y in combinations(order, 2):
            edges.add(tuple(sorted((relabel[x], relabel[y]))))
    else:
        for x in (v for v in order if v[0] == "L"):
            for y in (v for v in order if v[0] == "R"):
                edges.add(tuple(sorted((relabel[x], relabel[y]))))
    return RootedGraph(vertex_count=spec.v_g, root_count=root_count, edges=frozenset(edges))


def is_balanced(rg: RootedGraph, budget: int = BALANCE_BUDGET) -> bool:
    """Whether no root-containing induced subgraph beats the full density.

    Enumerates every nonempty subset of the non-root vertices; 2^s subsets,
    guarded by a budget.
    """
    if rg.s > budget:
        raise BudgetError(f"balancedness enumeration over 2^{rg.s} subsets exceeds budget")
    full = rg.density
    roots = range(rg.root_count)
    nonroots = range(rg.root_count, rg.vertex_count)
    for size in range(1, rg.s + 1):
        for chosen in combinations(nonroots, size):
            vertices = set(roots) | set(chosen)
            t = sum(
                1 for a, b in rg.edges if a in vertices and b in vertices and b >= rg.root_count
            )
            if t / size > full:
                return False
    return True


def _scan_extensions(rg: RootedGraph, embedding: RootEmbedding, sample: GraphSample, induced: bool):
    """Enumerate valid labelings; returns (z_sets, z_labeled, embedded edge sets)."""
    r, s = rg.root_count, rg.s
    if len(embedding.vertices) != r:
        raise ValueError(f"embedding carries {len(embedding.vertices)} roots, pattern has {r}")
    if sample.N - r < s:
        raise ValueError("host graph has too few vertices outside the roots")
    roots = embedding.vertices
    candidates = [v for v in range(sample.N) if v not in set(roots)]
    z_sets = z_labeled = 0
    subgraphs = set()
    for chosen in combinations(candidates, s):
        found = False
        for perm in permutations(chosen):
            ok = True
            for j in range(s):
                for i in range(r):
                    want = rg.has_edge(i, rg.root_count + j)
                    got = sample.has_edge(roots[i], perm[j])
                    if (induced and want != got) or (not induced and want and not got):
                        ok = False
                        break
                if not ok:
                    break
                for j2 in range(j + 1, s):
                    want = rg.has_edge(rg.root_count + j, rg.root_count + j2)
                    got = sample.has_edge(perm[j], perm[j2])
                    if (induced and want != got) or (not induced and want and not got):
                        ok = False
                        break
                if not ok:
                    break
            if ok:
                z_labeled += 1
                found = True
                embedded = frozenset(
                    tuple(sorted((roots[i], perm[j])))
                    for j in range(s)
                    for i in range(r)
                    if rg.has_edge(i, rg.root_count + j)
                ) | frozenset(
                    tuple(sorted((perm[j], perm[j2])))
                    for j in range(s)
                    for j2 in range(j + 1, s)
                    if rg.has_edge(rg.root_count + j, rg.root_count + j2)
                )
                subgraphs.add(embedded)
        if found:
            z_sets += 1
    return z_sets, z_labeled, subgraphs


def count_extensions(
    rg: RootedGraph, embedding: RootEmbedding, sample: GraphSample, induced: bool = True
) -> ExtensionCount:
    """Count extensions of the rooted pattern from a root embedding.

    A labeling y_1..y_s of a candidate vertex set is valid when pattern
    root/non-root and non-root/non-root adjacencies are reproduced in the
    sample; with ``induced=True`` non-adjacencies must be reproduced as well.
    Pairs inside the root embedding are never inspected.
    """
    z_sets, z_labeled, subgraphs = _scan_extensions(rg, embedding, sample, induced)
    return ExtensionCount(
        z_sets=z_sets,
        z_labeled=z_labeled,
        z_subgraphs=len(subgraphs),
        induced=induced,
        sample=sample,
    )


def sample_gnq(N: int, q: float, stream: TrialStream) -> GraphSample:
    """Sample a graph on N vertices keeping every K_N edge with probability q."""
    if not 0.0 < q < 1.0:
        raise ValueError(f"retention probability must lie in (0, 1), got {q}")
    kept = stream.uniforms(comb(N, 2)) < q
    return GraphSample(N=N, kept=kept)


def expected_extensions(spec: GraphSpec, root_count: int, N: int, q: float) -> float:
    """Exact expected number of extension vertex sets in a q-sampled graph.

    Complete patterns impose only edge requirements; bipartite patterns also
    require non-adjacencies (the counting is of exact embedded copies), and
    the same non-root set can extend through several side splits, which are
    disjoint events.
    """
    rg = build_rooted(spec, root_count)
    s, t = rg.s, rg.t
    if spec.family == "complete":
        return comb(N - root_count, s) * q**t
    a, _ = spec.parts
    splits = comb(s, a - 1)  # side assignments of the non-root set; disjoint events
    quantified = root_count * s + comb(s, 2)
    return comb(N - root_count, s) * splits * q**t * (1.0 - q) ** (quantified - t)


@dataclass(frozen=True)
class ZIdentityReport:
    spec_label: str
    N: int
    q: float
    trials_total: int
    trials_conditioned: int
    mismatches: int
    all_equal: bool
    z1_mean: float
    z1_stderr: float
    expected_z1: float


def z_identity_check(
    spec: GraphSpec,
    N: int,
    q: float,
    cfg: TrialConfig,
    conditioned_target: int | None = None,
    lane: int = LANE_EXTENSION,
) -> ZIdentityReport:
    """Per-trial identity between the surviving degree of the root edge and
    the extension count from its endpoints.

    On trials where the root edge survives, its degree in the percolated
    subgraph-count hypergraph must equal the number of extensions, exactly.
    Complete patterns use the deduplicated vertex-set count; bipartite
    patterns compare against distinct embedded edge sets without induced
    non-adjacency constraints, which is the count the identity is exact for.
    """
    H = subgraph_hypergraph(spec, N)
    e1 = pair_rank(0, 1)
    rg = build_rooted(spec, 2)
    induced = spec.family == "complete"
    # for asymmetric bipartite patterns a copy may place either endpoint of
    # the root edge on either side, so both root orientations are scanned
    orientations = [RootEmbedding(vertices=(0, 1))]
    if spec.family == "complete_bipartite" and spec.parts[0] != spec.parts[1]:
        orientations.append(RootEmbedding(vertices=(1, 0)))
    member_edges = H.incidence[e1]
    edge_arr = H.edges_arr[list(member_edges)] if member_edges else np.empty((0, H.k), np.int64)
    z_values = []
    conditioned = mismatches = 0
    trial = 0
    total_target = cfg.trials if conditioned_target is None else None
    trial_cap = (
        None if conditioned_target is None else max(1000, math.ceil(conditioned_target / q * 20))
    )
    while True:
        if total_target is not None and trial >= total_target:
            break
        if conditioned_target is not None and conditioned >= conditioned_target:
            break
        if trial_cap is not None and trial >= trial_cap:
            raise InfeasibleError(
                f"only {conditioned} of {conditioned_target} conditioned trials "
                f"after {trial} samples at q={q}"
            )
        sample = sample_gnq(N, q, TrialStream(cfg.master_seed, trial, lane))
        if induced:
            z1 = count_extensions(rg, orientations[0], sample, induced=True).z_sets
        else:
            images = set()
            for root in orientations:
                images |= _scan_extensions(rg, root, sample, induced=False)[2]
            z1 = len(images)
        z_values.append(z1)
        if sample.kept[e1]:
            conditioned += 1
            deg_e1 = int(sample.kept[edge_arr].all(axis=1).sum()) if len(member_edges) else 0
            if deg_e1 != z1:
                mismatches += 1
        trial += 1
    zs = np.array(z_values, dtype=np.float64)
    stderr = float(zs.std(ddof=1) / math.sqrt(zs.size)) if zs.size > 1 else 0.0
    if induced:
        expected = expected_extensions(spec, 2, N, q)
    else:
        # monotone embedded-copy count: every image needs its t edges present
        a, _ = spec.parts
        expected = len(orientations) * comb(N - 2, rg.s) * comb(rg.s, a - 1) * q**rg.t
    return ZIdentityReport(
        spec_label=spec.label,
        N=N,
        q=q,
        trials_total=trial,
        trials_conditioned=conditioned,
        mismatches=mismatches,
        all_equal=mismatches == 0,
        z1_mean=float(zs.mean()),
        z1_stderr=stderr,
        expected_z1=expected,
    )


@dataclass(frozen=True)
class ExtensionCapReport:
    spec_label: str
    N: int
    p: float
    q: float
    trials: int
    trigger: bool
    z1_cap: float
    z1_violations: int
    z1_ci: tuple[float, float]
    z2_checked: int
    z2_violations: int
    z2_ci: tuple[float, float] | None
    threshold: float
    supported: bool


def extension_cap_check(
    spec: GraphSpec,
    N: int,
    p: float,
    q: float,
    params: NicenessParams,
    cfg: TrialConfig,
    lane: int = LANE_EXTENSION,
) -> ExtensionCapReport:
    """Monte Carlo check of the extension-count cap and of the two-root vs
    three-root comparison.

    Each trial samples a graph and a random root embedding; violations of
    Z1 <= max{2 q^(k-1) Delta, Gamma} are counted, and when the co-degree
    trigger fires, violations of Z2 <= Z1 / ln^4 n as well.  Violation
    frequencies carry exact CIs and are compared against 3 e^(-b lambda^2).
    """
    if not params.p <= q < 1.0:
        raise ValueError("q must lie in [p, 1)")
    H = subgraph_hypergraph(spec, N)
    deg = np.bincount(H.edges_arr.ravel(), minlength=H.n) if H.m else np.zeros(H.n, np.int64)
    delta_max = int(deg.max())
    n, m, k = H.n, H.m, H.k
    log_n = math.log(n)
    trigger = math.sqrt(p) * q ** (k - 1.5) * delta_max**2 * n * log_n >= m
    rg1 = build_rooted(spec, 2)
    rg2 = build_rooted(spec, 3) if spec.v_g >= 4 else None
    cap = max(2.0 * q ** (k - 1) * delta_max, params.gamma_cap)
    induced = spec.family == "complete"
    z1_viol = z2_viol = z2_checked = 0
    for t in range(cfg.trials):
        stream = TrialStream(cfg.master_seed, t, lane)
        gen = stream.generator()
        verts = gen.choice(N, size=3, replace=False)
        sample = GraphSample(N=N, kept=gen.random(comb(N, 2)) < q)
        z1 = count_extensions(
            rg1, RootEmbedding(vertices=tuple(int(x) for x in verts[:2])), sample, induced=induced
        ).z_sets
        if z1 > cap:
            z1_viol += 1
        if trigger and rg2 is not None:
            z2 = count_extensions(
                rg2, RootEmbedding(vertices=tuple(int(x) for x in verts)), sample, induced=induced
            ).z_sets
            z2_checked += 1
            if z2 > z1 * log_n**-4:
                z2_viol += 1
    threshold = 3.0 * math.exp(-params.b * params.lam**2)
    z1_ci = clopper_pearson(z1_viol, cfg.trials, cfg.significance)
    z2_ci = clopper_pearson(z2_viol, z2_checked, cfg.significance) if z2_checked else None
    supported = z1_ci[1] <= threshold and (z2_ci is None or z2_ci[1] <= threshold)
    return ExtensionCapReport(
        spec_label=spec.label,
        N=N,
        p=p,
        q=q,
        trials=cfg.trials,
        trigger=trigger,
        z1_cap=cap,
        z1_violations=z1_viol,
        z1_ci=z1_ci,
        z2_checked=z2_checked,
        z2_violations=z2_viol,
        z2_ci=z2_ci,
        threshold=threshold,
        supported=supported,
    )
