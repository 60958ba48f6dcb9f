"""Agglomerative single-linkage clustering over binary pattern rows.

Two merge policies are provided:

* SEQUENTIAL: the classic one-merge-per-step algorithm.  Each round merges
  exactly the lexicographically first (by ascending id pair) of the pairs
  achieving the global minimum dissimilarity.
* PAPER_REPRO: a round-based variant.  When the global minimum is exactly
  zero, every connected component of the zero-dissimilarity graph merges as
  one multiway cluster; otherwise disjoint minimum pairs are picked greedily
  in ascending (i, j) id order.  Several merges can happen per round.

Both are deterministic given the input row order.  All comparisons use
exact rational keys, so ties are decided exactly, never by float luck.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterator, NamedTuple, Sequence

from .dendrogram import DendroNode, Dendrogram
from .errors import ValidationError
from .features import PatternMatrix
from .metrics import ExactDissimilarity, Metric, distance


class MergePolicy(enum.Enum):
    SEQUENTIAL = "sequential"
    PAPER_REPRO = "paper"


class Linkage(enum.Enum):
    SINGLE = "single"


def policy_from_name(name: str) -> MergePolicy:
    try:
        return MergePolicy(name.lower())
    except ValueError:
        valid = ", ".join(p.value for p in MergePolicy)
        raise ValidationError(f"unknown policy {name!r} (expected one of: {valid})") from None


def linkage_from_name(name: str) -> Linkage:
    try:
        return Linkage(name.lower())
    except ValueError:
        raise ValidationError(f"unknown linkage {name!r} (only 'single' is implemented)") from None


@dataclass(frozen=True)
class ClusterId:
    """A cluster handle: numeric id plus display label.

    Ids 0..n-1 are the original rows (labelled by component name); merged
    clusters get ids n, n+1, ... and labels C1, C2, ... in creation order.
    """

    id: int
    label: str


@dataclass(frozen=True)
class ProximityMatrix:
    """Symmetric dissimilarity matrix over the currently active clusters.

    ``active`` is ascending by id; ``cells`` maps (i, j) with i < j to the
    dissimilarity.  The diagonal is implicitly zero and never stored.
    Treated as immutable: updates build a new matrix.
    """

    active: tuple[ClusterId, ...]
    cells: dict[tuple[int, int], ExactDissimilarity]

    def __post_init__(self):
        ids = [c.id for c in self.active]
        if ids != sorted(ids):
            raise ValidationError("active clusters must be ascending by id")

    def get(self, i: int, j: int) -> ExactDissimilarity:
        """Cell for two distinct active cluster ids, in either order."""
        if i == j:
            raise ValidationError("diagonal cells are not stored")
        return self.cells[(i, j) if i < j else (j, i)]

    def pairs(self) -> Iterator[tuple[ClusterId, ClusterId, ExactDissimilarity]]:
        """All unordered pairs in ascending lexicographic (i, j) id order."""
        for a_pos in range(len(self.active)):
            for b_pos in range(a_pos + 1, len(self.active)):
                a, b = self.active[a_pos], self.active[b_pos]
                yield a, b, self.cells[(a.id, b.id)]


class Merge(NamedTuple):
    new: ClusterId
    constituents: tuple[ClusterId, ...]


@dataclass(frozen=True)
class MergeRound:
    """One round of the engine: what merged, at what minimum, and the
    proximity matrix left after all of the round's merges."""

    round_index: int
    min_key: ExactDissimilarity
    merges: tuple[Merge, ...]
    matrix_after: ProximityMatrix


class ClusterResult(NamedTuple):
    dendrogram: Dendrogram
    trace: tuple[MergeRound, ...]


def initial_proximity(pattern: PatternMatrix, metric: Metric) -> ProximityMatrix:
    """Pairwise dissimilarities between all original pattern rows."""
    n = pattern.n_rows
    if n < 2:
        raise ValidationError("clustering needs at least 2 pattern rows")
    active = tuple(ClusterId(i, pattern.row_labels[i]) for i in range(n))
    cells = {}
    for i in range(n):
        for j in range(i + 1, n):
            cells[(i, j)] = distance(metric, pattern.rows[i], pattern.rows[j])
    return ProximityMatrix(active, cells)


def _zero_components(prox: ProximityMatrix) -> list[tuple[ClusterId, ...]]:
    adjacency: dict[int, set[int]] = {c.id: set() for c in prox.active}
    for a, b, cell in prox.pairs():
        if cell.key == 0:
            adjacency[a.id].add(b.id)
            adjacency[b.id].add(a.id)
    by_id = {c.id: c for c in prox.active}
    groups = []
    seen: set[int] = set()
    for c in prox.active:
        if c.id in seen or not adjacency[c.id]:
            continue
        component = set()
        frontier = [c.id]
        while frontier:
            node = frontier.pop()
            if node in component:
                continue
            component.add(node)
            frontier.extend(adjacency[node] - component)
        seen |= component
        groups.append(tuple(by_id[i] for i in sorted(component)))
    return groups


def select_merges(prox: ProximityMatrix,
                  policy: MergePolicy) -> tuple[tuple[tuple[ClusterId, ...], ...],
                                                ExactDissimilarity]:
    """Pick this round's merge groups under the given policy.

    Returns disjoint groups (each of >= 2 clusters, members ascending by id,
    groups ordered by smallest member id) plus the round's minimum
    dissimilarity.
    """
    if len(prox.active) < 2:
        raise ValidationError("need at least 2 active clusters to merge")
    min_cell: ExactDissimilarity | None = None
    first_pair: tuple[ClusterId, ClusterId] | None = None
    for a, b, cell in prox.pairs():
        if min_cell is None or cell.key < min_cell.key:
            min_cell, first_pair = cell, (a, b)
    if policy is MergePolicy.SEQUENTIAL:
        return (first_pair,), min_cell
    if min_cell.key == 0:
        return tuple(_zero_components(prox)), min_cell
    taken: set[int] = set()
    groups = []
    for a, b, cell in prox.pairs():
        if cell.key == min_cell.key and a.id not in taken and b.id not in taken:
            groups.append((a, b))
            taken.add(a.id)
            taken.add(b.id)
    return tuple(groups), min_cell


def linkage_update(prox: ProximityMatrix, group: Sequence[ClusterId],
                   new: ClusterId) -> ProximityMatrix:
    """Replace ``group`` by ``new`` using the single-linkage minimum rule.

    For every other active cluster k, the new cell d(k, new) is the minimum
    of d(k, m) over the group members m; all other cells are untouched.
    """
    group = tuple(group)
    if len(group) < 2:
        raise ValidationError("merge group must contain at least 2 clusters")
    active_ids = {c.id for c in prox.active}
    group_ids = {c.id for c in group}
    missing = sorted(group_ids - active_ids)
    if missing:
        raise ValidationError(f"merge group member(s) not active: {missing}")
    if new.id <= max(active_ids):
        raise ValidationError(
            f"new cluster id {new.id} is not fresh (must exceed every existing id)")
    remaining = tuple(c for c in prox.active if c.id not in group_ids)
    cells = {
        pair: cell for pair, cell in prox.cells.items()
        if pair[0] not in group_ids and pair[1] not in group_ids
    }
    for k in remaining:
        cells[(k.id, new.id)] = min(
            (prox.get(k.id, m) for m in sorted(group_ids)), key=lambda c: c.key)
    return ProximityMatrix(remaining + (new,), cells)


def cluster(pattern: PatternMatrix, metric: Metric,
            linkage: Linkage = Linkage.SINGLE,
            policy: MergePolicy = MergePolicy.SEQUENTIAL) -> ClusterResult:
    """Run the full agglomeration and return the merge tree plus round trace.

    Merged-cluster labels C1, C2, ... follow creation order within and
    across rounds.  Every round's snapshot matrix is kept in the trace.
    """
    if linkage is not Linkage.SINGLE:
        raise ValidationError("only single linkage is implemented")
    prox = initial_proximity(pattern, metric)
    n = pattern.n_rows
    nodes: dict[int, DendroNode] = {
        c.id: DendroNode(c.id, c.label) for c in prox.active}
    trace: list[MergeRound] = []
    next_id = n
    round_index = 0
    while len(prox.active) > 1:
        round_index += 1
        groups, min_key = select_merges(prox, policy)
        merges = []
        for group in groups:
            new = ClusterId(next_id, f"C{next_id - n + 1}")
            prox = linkage_update(prox, group, new)
            nodes[new.id] = DendroNode(
                new.id, new.label, tuple(c.id for c in group), min_key, round_index)
            merges.append(Merge(new, group))
            next_id += 1
        trace.append(MergeRound(round_index, min_key, tuple(merges), prox))
    dend = Dendrogram(nodes, root=next_id - 1, n_leaves=n)
    return ClusterResult(dend, tuple(trace))
