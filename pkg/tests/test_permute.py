import math
import random

import pytest

from heapopt.gadgets import chain_keys
from heapopt.machine import Opcode, Trace, init_machine, replay_verify, trace_for
from heapopt.permute import C_PERM, permute_to_path, segment_preprocess
from heapopt.tree import InvalidInput, build_path, random_tree, validate


def perm_bound(n, k):
    return C_PERM * n * (int(math.log(n, k)) + 1)


def fragment_as_trace(tree_before, k, order, ops, machine):
    """Wrap a permute fragment into a one-access trace serving order[0]."""
    from heapopt.gadgets import Recorder

    trace = trace_for(tree_before, k)
    rec = Recorder(machine)
    rec.ops = list(ops)  # continue the recorded stream without resets
    machine.pending_key = order[0]
    rec.goto(1, machine.tree.leaf_of(order[0]))
    rec.do(1, Opcode.Serve)
    trace.accesses.append((order[0], rec.ops))
    return trace


def run_permute(n, k, order, tree=None, seed=0):
    tree = tree if tree is not None else build_path(list(range(1, n + 1)))
    before = tree.clone()
    machine = init_machine(tree, k)
    ops = permute_to_path(machine, order)
    assert validate(machine.tree) == []
    assert chain_keys(machine.tree, machine.tree.root) == order
    # replay-verify the fragment wrapped as one access
    trace = fragment_as_trace(before, k, order, ops, machine)
    report = replay_verify(trace, [order[0]])
    assert report.total == len(trace.accesses[0][1])
    return ops


def test_pair_identity_near_noop():
    ops = run_permute(2, 2, [1, 2])
    assert len(ops) <= C_PERM * 2


def test_pair_reverse():
    ops = run_permute(2, 2, [2, 1])
    assert len(ops) <= C_PERM * 2


def test_n8_k2_reverse():
    order = list(range(8, 0, -1))
    ops = run_permute(8, 2, order)
    assert len(ops) <= perm_bound(8, 2)


def test_n16_k4_random_order():
    rng = random.Random(42)
    order = list(range(1, 17))
    rng.shuffle(order)
    ops = run_permute(16, 4, order)
    assert len(ops) <= C_PERM * 16 * 3  # log_4 16 = 2, plus one


def test_requires_two_fingers():
    tree = build_path([1, 2, 3])
    machine = init_machine(tree, 1)
    with pytest.raises(InvalidInput):
        permute_to_path(machine, [1, 2, 3])


def test_rejects_non_permutation():
    tree = build_path([1, 2, 3])
    machine = init_machine(tree, 2)
    with pytest.raises(InvalidInput):
        permute_to_path(machine, [1, 2, 2])


@pytest.mark.parametrize("n", [6, 9, 13, 16, 33, 64])
@pytest.mark.parametrize("k", [2, 3, 4, 7, 16])
def test_order_exact_on_path_inputs(n, k):
    rng = random.Random(n * 31 + k)
    order = list(range(1, n + 1))
    rng.shuffle(order)
    ops = run_permute(n, k, order)
    assert len(ops) <= perm_bound(n, k)


@pytest.mark.parametrize("n", [5, 12, 27, 40])
@pytest.mark.parametrize("k", [2, 5])
def test_order_exact_on_random_trees(n, k):
    rng = random.Random(n * 7 + k)
    order = list(range(1, n + 1))
    rng.shuffle(order)
    tree = random_tree(n, rng)
    run_permute(n, k, order, tree=tree)


def test_cost_regression_grid():
    rng = random.Random(7)
    ratios = []
    for n in (8, 32, 128, 512, 2048, 4096):
        for k in (2, 4, 16):
            order = list(range(1, n + 1))
            rng.shuffle(order)
            tree = build_path(list(range(1, n + 1)))
            machine = init_machine(tree, k)
            ops = permute_to_path(machine, order)
            assert chain_keys(machine.tree, machine.tree.root) == order
            denom = n * (int(math.log(n, k)) + 1)
            ratios.append(len(ops) / denom)
    assert max(ratios) <= C_PERM, f"worst ratio {max(ratios):.2f}"


def test_segment_preprocess_layout():
    tree = build_path(list(range(1, 9)))
    machine = init_machine(tree, 2)
    ops, requested, parked = segment_preprocess(machine, [3, 1, 3, 7])
    assert requested == [3, 1, 7]
    assert parked == [2, 4, 5, 6, 8]
    assert chain_keys(machine.tree, machine.tree.root) == requested + parked
    n = 8
    assert len(ops) <= C_PERM * n * (int(math.log(n, 2)) + 1)


def test_segment_preprocess_all_requested():
    tree = build_path(list(range(1, 5)))
    machine = init_machine(tree, 2)
    ops, requested, parked = segment_preprocess(machine, [4, 2, 1, 3])
    assert requested == [4, 2, 1, 3]
    assert parked == []
    assert chain_keys(machine.tree, machine.tree.root) == [4, 2, 1, 3]


def test_segment_preprocess_empty_segment():
    tree = build_path(list(range(1, 9)))
    machine = init_machine(tree, 2)
    ops, requested, parked = segment_preprocess(machine, [])
    assert requested == []
    assert parked == list(range(1, 9))
    n = 8
    assert len(ops) <= C_PERM * n * (int(math.log(n, 2)) + 1)
