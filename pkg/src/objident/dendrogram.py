"""Merge tree: flat cuts and ASCII / DOT / structured-document renderings.

Node ids follow creation order (leaves 0..n-1, merged clusters n, n+1, ...),
so a child's id is always smaller than its parent's.  All renderings are
pure functions of the tree; child ordering in every rendering is canonical
(by smallest leaf id in the subtree) so output is byte-deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import TYPE_CHECKING, Mapping, Sequence

from .errors import ValidationError
from .metrics import ExactDissimilarity

if TYPE_CHECKING:
    from .engine import MergeRound
    from .features import PatternMatrix
    from .report import CandidateObjectReport


@dataclass(frozen=True)
class DendroNode:
    """One tree node; leaves have no children and no height."""

    id: int
    label: str
    children: tuple[int, ...] = ()
    height: ExactDissimilarity | None = None
    round_index: int | None = None

    @property
    def is_leaf(self) -> bool:
        return not self.children


@dataclass(frozen=True)
class Dendrogram:
    """The full merge tree over ``n_leaves`` original components."""

    nodes: Mapping[int, DendroNode]
    root: int
    n_leaves: int

    @cached_property
    def _members(self) -> dict[int, frozenset[int]]:
        # Children ids precede parent ids, so one ascending pass suffices.
        members: dict[int, frozenset[int]] = {}
        for nid in sorted(self.nodes):
            node = self.nodes[nid]
            if node.is_leaf:
                members[nid] = frozenset((nid,))
            else:
                members[nid] = frozenset().union(*(members[c] for c in node.children))
        return members

    def members(self, node_id: int) -> frozenset[int]:
        """Leaf ids contained in the subtree rooted at ``node_id``."""
        return self._members[node_id]

    def leaf_labels(self, node_id: int) -> tuple[str, ...]:
        """Leaf labels of a subtree, ordered by leaf id."""
        return tuple(self.nodes[i].label for i in sorted(self.members(node_id)))

    def ordered_children(self, node_id: int) -> tuple[int, ...]:
        """Children sorted by their smallest contained leaf id."""
        kids = self.nodes[node_id].children
        return tuple(sorted(kids, key=lambda c: min(self.members(c))))


@dataclass(frozen=True)
class PartitionGroup:
    """One group of a flat partition: the subtree label plus its leaves."""

    label: str
    members: tuple[str, ...]


Partition = tuple[PartitionGroup, ...]


def _as_groups(d: Dendrogram, node_ids: list[int]) -> Partition:
    ordered = sorted(node_ids, key=lambda g: min(d.members(g)))
    return tuple(
        PartitionGroup(d.nodes[g].label, d.leaf_labels(g)) for g in ordered)


def cut_k(d: Dendrogram, k: int) -> Partition:
    """Undo merges from the top (highest creation order first) down to k groups.

    Multiway merge nodes split into all their children at once, so with
    such nodes some group counts are not reachable; those raise
    ValidationError rather than returning an approximate cut.
    """
    if not 1 <= k <= d.n_leaves:
        raise ValidationError(
            f"cut size {k} out of range 1..{d.n_leaves}")
    groups = [d.root]
    while len(groups) < k:
        target = max(g for g in groups if not d.nodes[g].is_leaf)
        groups.remove(target)
        groups.extend(d.nodes[target].children)
    if len(groups) != k:
        raise ValidationError(
            f"cut of exactly {k} groups is not reachable: a multiway merge "
            f"steps straight to {len(groups)} groups")
    return _as_groups(d, groups)


def _subtree_max_key(d: Dendrogram, node_id: int) -> ExactDissimilarity | None:
    best: ExactDissimilarity | None = None
    stack = [node_id]
    while stack:
        node = d.nodes[stack.pop()]
        if node.height is not None and (best is None or best.key < node.height.key):
            best = node.height
        stack.extend(node.children)
    return best


def cut_height(d: Dendrogram, h) -> Partition:
    """Maximal subtrees whose merge heights are all <= h.

    ``h`` is in display units (the dissimilarity itself, not its rounded
    form) and is compared exactly; pass a string like "1.5" for an exact
    decimal threshold.
    """
    try:
        threshold = Fraction(h)
    except (ValueError, TypeError) as exc:
        raise ValidationError(f"invalid cut height {h!r}") from exc
    if threshold < 0:
        raise ValidationError("cut height must be >= 0")
    groups: list[int] = []
    stack = [d.root]
    while stack:
        nid = stack.pop()
        node = d.nodes[nid]
        top = _subtree_max_key(d, nid)
        if node.is_leaf or top is None or top.within_height(threshold):
            groups.append(nid)
        else:
            stack.extend(node.children)
    return _as_groups(d, groups)


def _node_line(node: DendroNode) -> str:
    if node.is_leaf:
        return node.label
    return f"{node.label}  {node.height.display}"


def render_ascii(d: Dendrogram) -> str:
    """Deterministic monospaced tree, one node per line, root first."""
    lines: list[str] = []
    # Stack holds (node id, prefix for this line, prefix for its children).
    stack: list[tuple[int, str, str]] = [(d.root, "", "")]
    while stack:
        nid, prefix, child_prefix = stack.pop()
        lines.append(prefix + _node_line(d.nodes[nid]))
        kids = d.ordered_children(nid)
        for pos in range(len(kids) - 1, -1, -1):
            last = pos == len(kids) - 1
            stack.append((
                kids[pos],
                child_prefix + ("`-- " if last else "|-- "),
                child_prefix + ("    " if last else "|   "),
            ))
    return "\n".join(lines) + "\n"


def render_dot(d: Dendrogram) -> str:
    """Directed graph text: one node per leaf and merge, edges child -> parent."""
    def esc(text: str) -> str:
        return text.replace("\\", "\\\\").replace('"', '\\"')

    lines = ["digraph dendrogram {", "  rankdir=BT;"]
    for nid in sorted(d.nodes):
        node = d.nodes[nid]
        if node.is_leaf:
            lines.append(f'  n{nid} [shape=box, label="{esc(node.label)}"];')
        else:
            lines.append(
                f'  n{nid} [label="{esc(node.label)}\\n{node.height.display}"];')
    for nid in sorted(d.nodes):
        for child in d.ordered_children(nid):
            lines.append(f"  n{child} -> n{nid};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _key_doc(key: Fraction) -> dict:
    return {"num": key.numerator, "den": key.denominator}


def _node_doc(d: Dendrogram, node_id: int) -> dict:
    node = d.nodes[node_id]
    if node.is_leaf:
        return {"label": node.label}
    return {
        "label": node.label,
        "height": node.height.display,
        "height_key": _key_doc(node.height.key),
        "round": node.round_index,
        "children": [_node_doc(d, c) for c in d.ordered_children(node_id)],
    }


def _matrix_doc(matrix) -> dict:
    labels = [c.label for c in matrix.active]
    display_rows = []
    key_rows = []
    for i in range(1, len(matrix.active)):
        row_disp = []
        row_keys = []
        for j in range(i):
            cell = matrix.get(matrix.active[j].id, matrix.active[i].id)
            row_disp.append(cell.display)
            row_keys.append(_key_doc(cell.key))
        display_rows.append(row_disp)
        key_rows.append(row_keys)
    return {"labels": labels, "display_values": display_rows, "exact_keys": key_rows}


def to_structured(d: Dendrogram, trace: Sequence["MergeRound"], *,
                  schema=None, pattern: "PatternMatrix | None" = None,
                  report: "CandidateObjectReport | None" = None) -> dict:
    """Assemble the machine-readable output document.

    Always contains ``rounds`` (per-round merges plus lower-triangle matrix
    snapshots with 2-decimal display values and exact rational keys) and
    ``dendrogram``; ``schema``, ``pattern_matrix``, and ``report`` sections
    are included when the corresponding inputs are given.
    """
    doc: dict = {}
    if schema is not None:
        doc["schema"] = {
            "subject_types": list(schema.subject_types),
            "relations": [
                {"label": r.label, "kind": r.kind.value, "subject": r.subject}
                for r in schema.relations
            ],
        }
    if pattern is not None:
        doc["pattern_matrix"] = {
            "row_labels": list(pattern.row_labels),
            "col_labels": list(pattern.col_labels),
            "rows": [list(row) for row in pattern.rows],
        }
    doc["rounds"] = [
        {
            "round": r.round_index,
            "min_display": r.min_key.display,
            "min_key": _key_doc(r.min_key.key),
            "merges": [
                {
                    "label": m.new.label,
                    "member_labels": [c.label for c in m.constituents],
                }
                for m in r.merges
            ],
            "matrix": _matrix_doc(r.matrix_after),
        }
        for r in trace
    ]
    doc["dendrogram"] = _node_doc(d, d.root)
    if report is not None:
        doc["report"] = report.to_doc()
    return doc
