import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heapopt.tree import (
    InvalidInput,
    balanced_tree,
    build_path,
    depth_of_key,
    dumps,
    find_separator_edges,
    inorder_keys,
    loads,
    path_order,
    random_tree,
    recompute_min_labels,
    separator_parts,
    subtree_leaf_counts,
    tree_from_text,
    tree_to_text,
    validate,
)


def test_build_path_single_leaf():
    tree = build_path([5])
    # single-key tree is a bare leaf, wearing key 5 spelled as 1..n? No:
    # the universe check in validate expects keys 1..n, so use key 1 here.
    assert tree.nodes[tree.root].key == 5


def test_build_path_pair():
    tree = build_path([1, 2])
    root = tree.nodes[tree.root]
    assert not root.is_leaf
    assert tree.nodes[root.left].key == 1
    assert tree.nodes[root.right].key == 2
    assert validate(tree) == []


def test_build_path_three_inorder_and_validate():
    tree = build_path([1, 2, 3])
    assert validate(tree) == []
    assert inorder_keys(tree) == [1, 2, 3]
    assert path_order(tree) == [1, 2, 3]


def test_build_path_rejects_duplicates():
    with pytest.raises(InvalidInput):
        build_path([1, 1])


def test_validate_detects_parent_child_mismatch():
    tree = build_path([1, 2, 3])
    # corrupt: root's left child claims a different parent
    left = tree.nodes[tree.root].left
    tree.nodes[left].parent = left
    assert len(validate(tree)) >= 1


def test_validate_detects_duplicate_keys():
    tree = build_path([1, 2])
    leaf = tree.nodes[tree.root].left
    tree.nodes[leaf].key = 2
    assert any("duplicate" in p or "keys" in p for p in validate(tree))


def test_min_labels_single_leaf():
    tree = build_path([1])
    recompute_min_labels(tree)
    assert tree.nodes[tree.root].min_label is None


def test_min_labels_two_leaves():
    tree = tree_from_text("(2 1)")
    recompute_min_labels(tree)
    assert tree.nodes[tree.root].min_label == 1


def brute_force_min(tree, nid):
    node = tree.nodes[nid]
    if node.is_leaf:
        return node.key
    vals = [brute_force_min(tree, c) for c in (node.left, node.right)
            if c is not None]
    return min(vals)


def test_min_labels_path_against_brute_force():
    tree = build_path([4, 2, 9][::1])
    # relabel keys to 1..3 universe: use permutation of 1..3 with same shape
    tree = build_path([3, 1, 2])
    recompute_min_labels(tree)
    for nid, node in tree.nodes.items():
        if not node.is_leaf:
            assert node.min_label == brute_force_min(tree, nid)


def test_min_labels_idempotent():
    rng = random.Random(7)
    tree = random_tree(9, rng)
    recompute_min_labels(tree)
    first = {nid: n.min_label for nid, n in tree.nodes.items()}
    recompute_min_labels(tree)
    assert first == {nid: n.min_label for nid, n in tree.nodes.items()}


def test_separators_two_leaves():
    tree = build_path([1, 2])
    cuts = find_separator_edges(tree, 2)
    parts = [p for p in separator_parts(tree, cuts) if p]
    assert sorted(len(p) for p in parts) == [1, 1]


def test_separators_balanced_eight():
    tree = balanced_tree(8)
    cuts = find_separator_edges(tree, 2)
    parts = [p for p in separator_parts(tree, cuts) if p]
    assert sorted(len(p) for p in parts) == [4, 4]


def test_separators_path_nine():
    tree = build_path(list(range(1, 10)))
    cuts = find_separator_edges(tree, 3)
    parts = [p for p in separator_parts(tree, cuts) if p]
    bound = -(-2 * 9 // 3)
    assert all(len(p) <= bound for p in parts)
    assert set().union(*parts) == set(range(1, 10))


def all_shapes(n):
    """Every full binary tree shape on n leaves, as nested tuples."""
    if n == 1:
        yield "leaf"
        return
    for i in range(1, n):
        for l in all_shapes(i):
            for r in all_shapes(n - i):
                yield (l, r)


def shape_to_tree(shape):
    from heapopt.tree import TreeStore, LEFT, RIGHT

    tree = TreeStore()
    counter = [0]

    def build(s):
        if s == "leaf":
            counter[0] += 1
            return tree.new_leaf(counter[0])
        nid = tree.new_internal()
        tree.set_child(nid, LEFT, build(s[0]))
        tree.set_child(nid, RIGHT, build(s[1]))
        return nid

    tree.root = build(shape)
    tree.nodes[tree.root].parent = None
    return tree


def test_separators_exhaustive_small():
    # disjoint, covering, each part <= ceil(2n/k), at most 2k roots
    for n in range(2, 9):
        for shape in all_shapes(n):
            tree = shape_to_tree(shape)
            for k in range(2, n + 1):
                cuts = find_separator_edges(tree, k)
                assert len(cuts) <= 2 * k
                parts = separator_parts(tree, cuts)
                bound = -(-2 * n // k)
                seen = set()
                for p in parts:
                    assert len(p) <= bound
                    assert not (p & seen)
                    seen |= p
                assert seen == set(range(1, n + 1))


def test_inorder_and_depth_examples():
    single = build_path([1])
    assert depth_of_key(single, 1) == 0
    pair = build_path([1, 2])
    assert depth_of_key(pair, 1) == 1
    tree = build_path([1, 2, 3])
    assert inorder_keys(tree) == [1, 2, 3]


def test_json_roundtrip():
    rng = random.Random(3)
    tree = random_tree(12, rng)
    again = loads(dumps(tree))
    assert validate(again) == []
    assert inorder_keys(again) == inorder_keys(tree)


def test_text_roundtrip():
    tree = build_path([2, 1, 3])
    text = tree_to_text(tree)
    again = tree_from_text(text)
    assert tree_to_text(again) == text
    assert path_order(again) == [2, 1, 3]


def test_subtree_leaf_counts():
    tree = balanced_tree(8)
    counts = subtree_leaf_counts(tree)
    assert counts[tree.root] == 8


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=1, max_value=40), st.integers(min_value=0, max_value=10**6))
def test_random_trees_validate(n, seed):
    tree = random_tree(n, random.Random(seed))
    assert validate(tree) == []
    assert sorted(inorder_keys(tree)) == list(range(1, n + 1))


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=2, max_value=30), st.integers(min_value=0, max_value=10**6))
def test_build_path_order_matches(n, seed):
    rng = random.Random(seed)
    keys = list(range(1, n + 1))
    rng.shuffle(keys)
    tree = build_path(keys)
    assert validate(tree) == []
    assert path_order(tree) == keys
    assert inorder_keys(tree) == keys
