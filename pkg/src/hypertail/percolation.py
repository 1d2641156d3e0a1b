"""Vertex percolation and the iterative exposure chain.

A single percolation keeps every vertex independently with probability q.
The exposure chain realises the same law in rounds: starting from the full
vertex set, each round keeps the previous survivors independently with
probability epsilon, and after I rounds with epsilon^I = p the surviving set
is distributed exactly as a single percolation at p.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import DegreeProfile, Hypergraph, InfeasibleError, degree_profile
from .rng import TrialStream

STRICT_EPS_RANGE = (1e-6, 1e-3)
_REL_TOL = 1e-12


@dataclass(frozen=True)
class PercolationSample:
    """Outcome of one percolation: survivor bitmap, edge count and degrees."""

    q: float
    kept: np.ndarray
    edge_count: int
    deg: np.ndarray


@dataclass(frozen=True)
class ExposureSchedule:
    """Round count I and per-round retention epsilon with epsilon^I = p."""

    p: float
    epsilon: float
    rounds: int
    eps_range: tuple[float, float]
    strict_mode: bool = False

    def __post_init__(self):
        if self.rounds < 1:
            raise ValueError("schedule needs at least one round")
        if abs(self.epsilon**self.rounds - self.p) > _REL_TOL * self.p:
            raise ValueError("epsilon^rounds does not reproduce p to 1e-12 relative error")


@dataclass(frozen=True)
class RoundState:
    """Survivors and degree statistics after round ``index`` of the chain.

    ``codeg_trigger`` records whether this round is in the regime where the
    co-degree smallness condition is switched on, and ``eta`` is the matching
    pair-overlap factor (k / ln^3 n when triggered, else 1).
    """

    index: int
    kept: np.ndarray
    edge_count: int
    deg: np.ndarray
    deg_sq_sum: int
    codeg_trigger: bool
    eta: float


@dataclass(frozen=True)
class PreconditionReport:
    """Evaluation of the four per-round conditions that keep the chain's
    induction alive, plus the deviation radii and per-vertex change bounds."""

    index: int
    holds: tuple[bool, bool, bool, bool]
    window: tuple[float, float]
    deg_sq_bound: float
    deg_cap: float
    t1: float
    t2: float
    lipschitz_max: float
    max_codeg: int
    min_pos_deg: int | None
    codeg_holds_literal: bool

    @property
    def all_hold(self) -> bool:
        return all(self.holds)


def percolate(H: Hypergraph, q: float, stream: TrialStream) -> PercolationSample:
    """Keep every vertex independently with probability q.

    Vertex v's decision is the v-th uniform of the stream, so two calls with
    the same (master_seed, trial, lane) produce identical samples.
    """
    if not 0.0 < q < 1.0:
        raise ValueError(f"retention probability must lie in (0, 1), got {q}")
    kept = stream.uniforms(H.n) < q
    alive = surviving_edge_mask(H, kept)
    deg = surviving_degrees(H, alive)
    return PercolationSample(q=q, kept=kept, edge_count=int(alive.sum()), deg=deg)


def surviving_edge_mask(H: Hypergraph, kept: np.ndarray) -> np.ndarray:
    """Boolean mask over edges: True where all k vertices survive."""
    if H.m == 0:
        return np.zeros(0, dtype=bool)
    return kept[H.edges_arr].all(axis=1)


def surviving_degrees(H: Hypergraph, alive: np.ndarray) -> np.ndarray:
    """Per-vertex degree counting only the edges flagged in ``alive``."""
    if H.m == 0 or not alive.any():
        return np.zeros(H.n, dtype=np.int64)
    return np.bincount(H.edges_arr[alive].ravel(), minlength=H.n).astype(np.int64)


def surviving_pair_counts(H: Hypergraph, alive: np.ndarray) -> np.ndarray:
    """Co-degree of every co-occurring pair, restricted to surviving edges."""
    pairs = H.pair_index
    if pairs.count == 0 or not alive.any():
        return np.zeros(pairs.count, dtype=np.int64)
    return np.bincount(pairs.edge_pair_ids[alive].ravel(), minlength=pairs.count).astype(np.int64)


def codegree_sums(H: Hypergraph, alive: np.ndarray) -> np.ndarray:
    """For each vertex v, sum of surviving co-degrees over all partners u.

    Computed from the pair index, deliberately not via degrees, so it can be
    cross-checked against (k-1) * deg as a bookkeeping identity.
    """
    pairs = H.pair_index
    counts = surviving_pair_counts(H, alive)
    out = np.zeros(H.n, dtype=np.int64)
    if pairs.count:
        np.add.at(out, pairs.u, counts)
        np.add.at(out, pairs.v, counts)
    return out


def surviving_codegree(H: Hypergraph, kept: np.ndarray, u: int, v: int) -> int:
    """Co-degree of u, v in the surviving sub-hypergraph."""
    if not (kept[u] and kept[v]):
        return 0
    alive = surviving_edge_mask(H, kept)
    shared = set(H.incidence[u]).intersection(H.incidence[v])
    return int(sum(1 for e in shared if alive[e]))


def build_schedule(
    p: float,
    n: int,
    eps_range: tuple[float, float] | None = None,
    strict_mode: bool = False,
    force_rounds: int | None = None,
) -> ExposureSchedule:
    """Construct (epsilon, I) with epsilon^I = p.

    The round count maximises I subject to epsilon <= eps_max, i.e.
    I = max(1, floor(ln p / ln eps_max)); ratios within 1e-9 of an integer
    are snapped so that exact powers are recognised.  ``force_rounds``
    overrides I.  In strict mode the range is pinned to [1e-6, 1e-3] and
    I <= ln n is enforced.
    """
    if strict_mode:
        eps_range = STRICT_EPS_RANGE
    elif eps_range is None:
        eps_range = STRICT_EPS_RANGE
    eps_min, eps_max = eps_range
    if not 0.0 < eps_min <= eps_max < 1.0:
        raise ValueError(f"invalid retention range {eps_range}")
    if not 0.0 < p < 1.0:
        raise ValueError(f"target probability must lie in (0, 1), got {p}")
    if p > eps_max * (1.0 + _REL_TOL):
        raise InfeasibleError(f"p={p} exceeds the maximum per-round retention {eps_max}")
    if force_rounds is not None:
        rounds = int(force_rounds)
        if rounds < 1:
            raise ValueError("force_rounds must be >= 1")
    else:
        ratio = math.log(p) / math.log(eps_max)
        nearest = round(ratio)
        rounds = int(nearest) if abs(ratio - nearest) <= 1e-9 else math.floor(ratio)
        rounds = max(1, rounds)
    epsilon = p ** (1.0 / rounds)
    if epsilon < eps_min * (1.0 - _REL_TOL) or epsilon > eps_max * (1.0 + _REL_TOL):
        raise InfeasibleError(
            f"per-round retention {epsilon} falls outside [{eps_min}, {eps_max}] for p={p}, I={rounds}"
        )
    if strict_mode and rounds > math.log(n):
        raise InfeasibleError(f"round count {rounds} exceeds ln n = {math.log(n):.3f} in strict mode")
    return ExposureSchedule(
        p=p, epsilon=epsilon, rounds=rounds, eps_range=eps_range, strict_mode=strict_mode
    )


def _round_state(
    H: Hypergraph, schedule: ExposureSchedule, profile: DegreeProfile, index: int, kept: np.ndarray
) -> RoundState:
    alive = surviving_edge_mask(H, kept)
    deg = surviving_degrees(H, alive)
    log_n = math.log(H.n)
    trigger = codeg_trigger(schedule.p, schedule.epsilon**index, H, profile)
    eta = H.k * log_n**-3 if trigger else 1.0
    return RoundState(
        index=index,
        kept=kept,
        edge_count=int(alive.sum()),
        deg=deg,
        deg_sq_sum=int((deg.astype(np.int64) ** 2).sum()),
        codeg_trigger=trigger,
        eta=eta,
    )


def codeg_trigger(p: float, q: float, H: Hypergraph, profile: DegreeProfile) -> bool:
    """Whether the co-degree condition is switched on at retention level q:
    p^(1/2) * q^(k-3/2) * max_degree^2 * n * ln n >= m."""
    lhs = math.sqrt(p) * q ** (H.k - 1.5) * profile.max_degree**2 * H.n * math.log(H.n)
    return lhs >= H.m


def run_exposure(
    H: Hypergraph,
    schedule: ExposureSchedule,
    stream: TrialStream,
    profile: DegreeProfile | None = None,
) -> list[RoundState]:
    """Run the full exposure chain, returning states for rounds 0..I.

    Round 0 is the deterministic full vertex set.  Round i filters round
    i-1's survivors using row i-1 of the stream's uniform matrix, so any
    round's outcome for any vertex can be replayed in isolation.
    """
    if profile is None:
        profile = degree_profile(H)
    uniforms = stream.uniform_matrix(schedule.rounds, H.n)
    kept = np.ones(H.n, dtype=bool)
    states = [_round_state(H, schedule, profile, 0, kept)]
    for i in range(1, schedule.rounds + 1):
        kept = kept & (uniforms[i - 1] < schedule.epsilon)
        states.append(_round_state(H, schedule, profile, i, kept))
    return states


def check_preconditions(
    H: Hypergraph,
    state: RoundState,
    schedule: ExposureSchedule,
    lam: float,
    gamma_cap: float,
    profile: DegreeProfile | None = None,
) -> PreconditionReport:
    """Evaluate the four inductive conditions at this round, exactly as stated.

    (1) the edge count sits in its shrinking window; (2) the degree-square sum
    is bounded; (3) every surviving degree respects max{2 eps^((k-1)i) Delta,
    Gamma}; (4) when the co-degree trigger fires, every surviving co-degree is
    at most (min positive surviving degree) / ln^3 n.  The literal variant of
    (4), which quantifies over degree-0 survivors as well, is also recorded.
    """
    if profile is None:
        profile = degree_profile(H)
    i = state.index
    eps, p, k = schedule.epsilon, schedule.p, H.k
    n, m = H.n, H.m
    delta_max = profile.max_degree
    log_n = math.log(n)

    center = eps ** (k * i) * m
    radius = i * (p**k * m) ** -0.5 * center + lam * math.sqrt(eps ** ((k + 1) * i) * m / p)
    window = (center - radius, center + radius)
    holds_window = window[0] <= state.edge_count <= window[1]

    deg_sq_bound = eps ** ((2 * k - 1) * i) * delta_max**2 * n * (1 + 3 * i * log_n**-2) + (
        6 * k * eps ** ((k + 0.5) * i) * m / math.sqrt(p)
    )
    holds_deg_sq = state.deg_sq_sum <= deg_sq_bound

    deg_cap = max(2 * eps ** ((k - 1) * i) * delta_max, gamma_cap)
    holds_cap = int(state.deg.max()) <= deg_cap if H.n else True

    alive = surviving_edge_mask(H, state.kept)
    pair_counts = surviving_pair_counts(H, alive)
    max_codeg = int(pair_counts.max()) if pair_counts.size else 0
    pos = state.deg[state.deg > 0]
    min_pos_deg = int(pos.min()) if pos.size else None
    kept_degs = state.deg[state.kept]
    min_kept_deg = int(kept_degs.min()) if kept_degs.size else None
    if not state.codeg_trigger:
        holds_codeg = True
        holds_codeg_literal = True
    else:
        holds_codeg = max_codeg == 0 or (
            min_pos_deg is not None and max_codeg <= min_pos_deg * log_n**-3
        )
        holds_codeg_literal = max_codeg == 0 or (
            min_kept_deg is not None and max_codeg <= min_kept_deg * log_n**-3
        )

    t1 = (p**k * m) ** -0.5 * eps ** (k * (i + 1)) * m + (1 - eps) * lam * math.sqrt(
        eps ** ((k + 1) * (i + 1)) * m / p
    )
    t2 = eps ** ((2 * k - 1) * (i + 1)) * delta_max**2 * n * log_n**-2 + (
        k * eps ** ((k + 0.5) * (i + 1)) * m / math.sqrt(p)
    )

    cross = np.zeros(n, dtype=np.int64)
    pairs = H.pair_index
    if pairs.count:
        deg = state.deg
        np.add.at(cross, pairs.u, pair_counts * deg[pairs.v])
        np.add.at(cross, pairs.v, pair_counts * deg[pairs.u])
    per_vertex = state.deg.astype(np.int64) ** 2 + 4 * cross
    lipschitz_max = float(per_vertex.max()) if n else 0.0

    return PreconditionReport(
        index=i,
        holds=(holds_window, holds_deg_sq, holds_cap, holds_codeg),
        window=window,
        deg_sq_bound=deg_sq_bound,
        deg_cap=deg_cap,
        t1=t1,
        t2=t2,
        lipschitz_max=lipschitz_max,
        max_codeg=max_codeg,
        min_pos_deg=min_pos_deg,
        codeg_holds_literal=holds_codeg_literal,
    )


def lipschitz_bound(H: Hypergraph, state: RoundState, v: int) -> int:
    """Worst-case change of the next round's degree-square sum when vertex v's
    retention outcome is flipped: deg(v)^2 + 4 * sum_u codeg(u, v) * deg(u)."""
    if not state.kept[v]:
        raise ValueError(f"vertex {v} is not a survivor of round {state.index}")
    alive = surviving_edge_mask(H, state.kept)
    codeg: dict[int, int] = {}
    for e in H.incidence[v]:
        if alive[e]:
            for u in H.edges[e]:
                if u != v:
                    codeg[u] = codeg.get(u, 0) + 1
    deg_v = int(state.deg[v])
    return deg_v**2 + 4 * sum(c * int(state.deg[u]) for u, c in codeg.items())
