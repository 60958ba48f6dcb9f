import itertools
import random
from fractions import Fraction

import pytest

from objident import (
    ClusterId,
    Linkage,
    MergePolicy,
    Metric,
    ValidationError,
    cluster,
    cut_k,
    initial_proximity,
    linkage_from_name,
    linkage_update,
    policy_from_name,
    select_merges,
)
from objident.features import (
    ComponentRecord,
    Relation,
    RelationKind,
    RelationSchema,
    build_pattern_matrix,
)

import oracle

METRIC_NAMES = {
    Metric.EUCLIDEAN: "euclidean",
    Metric.MANHATTAN: "manhattan",
    Metric.SIMPLE_MATCHING: "smc",
    Metric.JACCARD: "jaccard",
}


def make_pattern(rows, labels=None):
    """Realize arbitrary binary rows: one uses-field column per subject."""
    labels = labels or [f"f{i}" for i in range(len(rows))]
    t = len(rows[0])
    subjects = tuple(f"s{j}" for j in range(t))
    schema = RelationSchema(subjects, tuple(
        Relation(RelationKind.USES_FIELD, s, f"R{j}") for j, s in enumerate(subjects)))
    records = [
        ComponentRecord(label, None, (),
                        frozenset(s for s, bit in zip(subjects, row) if bit))
        for label, row in zip(labels, rows)
    ]
    pattern = build_pattern_matrix(records, schema)
    assert pattern.rows == tuple(tuple(row) for row in rows)
    return pattern


def by_label(prox, a, b):
    ids = {c.label: c.id for c in prox.active}
    return prox.get(ids[a], ids[b])


def leaf_members(dend, node_id):
    return frozenset(dend.nodes[i].label for i in dend.members(node_id))


def test_initial_proximity_examples(stacks):
    prox = initial_proximity(stacks.pattern, Metric.EUCLIDEAN)
    assert by_label(prox, "isEmptyRef", "rPush").display == "0.00"
    assert by_label(prox, "traRef", "initRef").display == "1.00"
    assert by_label(prox, "traRef", "isEmptyRef").key == Fraction(1)
    assert by_label(prox, "traRef", "isEmptyRef").display == "1.00"
    assert by_label(prox, "ePush", "initRef").key == Fraction(4)
    assert by_label(prox, "ePush", "initRef").display == "2.00"


def test_initial_proximity_needs_two_rows():
    with pytest.raises(ValidationError):
        initial_proximity(make_pattern([(0, 1)]), Metric.EUCLIDEAN)


def test_select_merges_zero_closure_round(stacks):
    prox = initial_proximity(stacks.pattern, Metric.EUCLIDEAN)
    groups, min_key = select_merges(prox, MergePolicy.PAPER_REPRO)
    assert min_key.key == 0
    assert [[c.label for c in g] for g in groups] == [
        ["isEmptyRef", "rPush", "rPop"],
        ["isEmptyExec", "ePush", "ePop"],
    ]


def test_select_merges_second_round_pairs(stacks):
    dend, trace = cluster(stacks.pattern, Metric.EUCLIDEAN,
                          policy=MergePolicy.PAPER_REPRO)
    second = trace[1]
    assert second.min_key.display == "1.00"
    assert [(m.new.label, [c.label for c in m.constituents]) for m in second.merges] == [
        ("C3", ["initRef", "traRef"]),
        ("C4", ["initExec", "traExec"]),
    ]


def test_select_merges_unique_minimum_both_policies():
    pattern = make_pattern([(0, 0, 0), (0, 0, 1), (1, 1, 1)])
    prox = initial_proximity(pattern, Metric.EUCLIDEAN)
    for policy in MergePolicy:
        groups, min_key = select_merges(prox, policy)
        assert [[c.label for c in g] for g in groups] == [["f0", "f1"]]
        assert min_key.key == 1


def test_select_merges_needs_two_clusters(stacks):
    dend, trace = cluster(stacks.pattern, Metric.EUCLIDEAN,
                          policy=MergePolicy.PAPER_REPRO)
    with pytest.raises(ValidationError):
        select_merges(trace[-1].matrix_after, MergePolicy.SEQUENTIAL)


def test_linkage_update_examples(stacks):
    prox = initial_proximity(stacks.pattern, Metric.EUCLIDEAN)
    ids = {c.label: c for c in prox.active}
    group = [ids["isEmptyRef"], ids["rPush"], ids["rPop"]]
    prox = linkage_update(prox, group, ClusterId(10, "C1"))
    assert by_label(prox, "C1", "initRef").display == "1.41"
    assert by_label(prox, "C1", "traRef").display == "1.00"


def test_linkage_update_between_merged_clusters(stacks):
    dend, trace = cluster(stacks.pattern, Metric.EUCLIDEAN,
                          policy=MergePolicy.PAPER_REPRO)
    assert by_label(trace[1].matrix_after, "C3", "C4").display == "2.00"


def test_linkage_update_rejects_inactive_member(stacks):
    prox = initial_proximity(stacks.pattern, Metric.EUCLIDEAN)
    ghost = ClusterId(99, "ghost")
    with pytest.raises(ValidationError, match="not active"):
        linkage_update(prox, [prox.active[0], ghost], ClusterId(100, "C1"))


def test_linkage_update_rejects_stale_id(stacks):
    prox = initial_proximity(stacks.pattern, Metric.EUCLIDEAN)
    with pytest.raises(ValidationError, match="not fresh"):
        linkage_update(prox, list(prox.active[:2]), ClusterId(3, "C1"))


def test_linkage_update_rejects_singleton_group(stacks):
    prox = initial_proximity(stacks.pattern, Metric.EUCLIDEAN)
    with pytest.raises(ValidationError):
        linkage_update(prox, [prox.active[0]], ClusterId(10, "C1"))


def test_cluster_reproduction_trace(stacks):
    dend, trace = cluster(stacks.pattern, Metric.EUCLIDEAN,
                          policy=MergePolicy.PAPER_REPRO)
    shape = [
        (r.round_index, r.min_key.display,
         [(m.new.label, [c.label for c in m.constituents]) for m in r.merges])
        for r in trace
    ]
    assert shape == [
        (1, "0.00", [("C1", ["isEmptyRef", "rPush", "rPop"]),
                     ("C2", ["isEmptyExec", "ePush", "ePop"])]),
        (2, "1.00", [("C3", ["initRef", "traRef"]),
                     ("C4", ["initExec", "traExec"])]),
        (3, "1.00", [("C5", ["C1", "C3"]), ("C6", ["C2", "C4"])]),
        (4, "2.00", [("C7", ["C5", "C6"])]),
    ]


def test_cluster_two_identical_rows():
    pattern = make_pattern([(0, 1), (0, 1)])
    dend, trace = cluster(pattern, Metric.EUCLIDEAN,
                          policy=MergePolicy.PAPER_REPRO)
    assert len(trace) == 1
    assert trace[0].min_key.key == 0
    assert dend.nodes[dend.root].height.display == "0.00"


def test_sequential_matches_brute_force_oracle(stacks):
    dend, trace = cluster(stacks.pattern, Metric.EUCLIDEAN,
                          policy=MergePolicy.SEQUENTIAL)
    assert len(trace) == 9
    steps = oracle.single_linkage_steps(list(stacks.pattern.rows), "euclidean")
    assert len(steps) == 9
    for merge_round, (key, pair_ids, members) in zip(trace, steps):
        merge = merge_round.merges[0]
        assert merge_round.min_key.key == key
        assert tuple(sorted(c.id for c in merge.constituents)) == tuple(sorted(pair_ids))
        assert dend.members(merge.new.id) == members


def test_sequential_pre_root_partition_splits_by_stack(stacks):
    dend, trace = cluster(stacks.pattern, Metric.EUCLIDEAN,
                          policy=MergePolicy.SEQUENTIAL)
    partition = cut_k(dend, 2)
    groups = {frozenset(g.members) for g in partition}
    assert groups == {
        frozenset({"initRef", "isEmptyRef", "rPush", "rPop", "traRef"}),
        frozenset({"initExec", "isEmptyExec", "ePush", "ePop", "traExec"}),
    }


def test_sequential_heights_non_decreasing(stacks):
    for metric in Metric:
        dend, trace = cluster(stacks.pattern, metric)
        keys = [r.min_key.key for r in trace]
        assert keys == sorted(keys)


def random_rows(rng, n=None, t=None):
    n = n or rng.randint(2, 10)
    t = t or rng.randint(1, 8)
    return [tuple(rng.randint(0, 1) for _ in range(t)) for _ in range(n)]


def test_cells_match_brute_force_on_random_matrices():
    rng = random.Random(20240601)
    metrics = list(Metric)
    for case in range(80):
        rows = random_rows(rng)
        metric = metrics[case % len(metrics)]
        pattern = make_pattern(rows)
        for policy in MergePolicy:
            dend, trace = cluster(pattern, metric, policy=policy)
            for merge_round in trace:
                prox = merge_round.matrix_after
                for a, b, cell in prox.pairs():
                    expected = oracle.group_key(
                        METRIC_NAMES[metric], rows,
                        dend.members(a.id), dend.members(b.id))
                    assert cell.key == expected


def test_euclidean_manhattan_identical_traces():
    rng = random.Random(99)
    for _ in range(40):
        rows = random_rows(rng)
        pattern = make_pattern(rows)
        for policy in MergePolicy:
            trace_e = cluster(pattern, Metric.EUCLIDEAN, policy=policy).trace
            trace_m = cluster(pattern, Metric.MANHATTAN, policy=policy).trace
            shape_e = [[{c.id for c in m.constituents} for m in r.merges] for r in trace_e]
            shape_m = [[{c.id for c in m.constituents} for m in r.merges] for r in trace_m]
            assert shape_e == shape_m


def test_merge_counts():
    rng = random.Random(4)
    for _ in range(40):
        rows = random_rows(rng)
        pattern = make_pattern(rows)
        dend, trace = cluster(pattern, Metric.JACCARD)
        assert sum(len(r.merges) for r in trace) == len(rows) - 1
        dend, trace = cluster(pattern, Metric.JACCARD, policy=MergePolicy.PAPER_REPRO)
        assert sum(len(r.merges) for r in trace) <= len(rows) - 1
        assert all(len(r.merges) >= 1 for r in trace)


# Pairwise distances 1, 3, 7, 2, 6, 4: unique at every step, so the
# hierarchy must not depend on row order.
UNIQUE_MIN_ROWS = {
    "a": (0, 0, 0, 0, 0, 0, 0, 0),
    "b": (0, 0, 0, 0, 0, 0, 0, 1),
    "c": (0, 0, 0, 0, 0, 1, 1, 1),
    "d": (0, 1, 1, 1, 1, 1, 1, 1),
}


def test_permutation_invariance_with_unique_minima():
    reference = None
    for order in itertools.permutations(UNIQUE_MIN_ROWS):
        pattern = make_pattern([UNIQUE_MIN_ROWS[k] for k in order], labels=list(order))
        dend, trace = cluster(pattern, Metric.EUCLIDEAN)
        hierarchy = frozenset(leaf_members(dend, nid)
                              for nid in dend.nodes if not dend.nodes[nid].is_leaf)
        if reference is None:
            reference = hierarchy
        assert hierarchy == reference
    assert frozenset({"a", "b"}) in reference
    assert frozenset({"a", "b", "c"}) in reference


def test_cluster_rejects_non_single_linkage(stacks):
    with pytest.raises(ValidationError, match="single"):
        cluster(stacks.pattern, Metric.EUCLIDEAN, linkage=object())


def test_name_resolution_helpers():
    assert policy_from_name("Paper") is MergePolicy.PAPER_REPRO
    assert policy_from_name("sequential") is MergePolicy.SEQUENTIAL
    assert linkage_from_name("SINGLE") is Linkage.SINGLE
    with pytest.raises(ValidationError):
        policy_from_name("random")
    with pytest.raises(ValidationError):
        linkage_from_name("complete")


def test_proximity_matrix_diagonal_not_stored(stacks):
    prox = initial_proximity(stacks.pattern, Metric.EUCLIDEAN)
    assert len(prox.cells) == 45
    with pytest.raises(ValidationError):
        prox.get(0, 0)
