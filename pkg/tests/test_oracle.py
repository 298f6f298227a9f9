import itertools
import math
import random

import pytest

from heapopt.machine import Opcode, init_machine
from heapopt.oracle import (
    ArrayServerReport,
    Refused,
    array_offline,
    check_persistent_finger_bound,
    count_servable,
    far_node_count,
    finger_distance_profile,
    optimum_cost,
    wilber_bound,
)
from heapopt.tree import build_path, random_tree


def test_optimum_single_leaf():
    assert optimum_cost(build_path([1]), [1], k=1) == 1


def test_optimum_pair_single_access():
    assert optimum_cost(build_path([1, 2]), [1], k=1) == 2


def test_optimum_pair_both_accesses_transient():
    assert optimum_cost(build_path([1, 2]), [1, 2], k=1) == 4


def test_optimum_refuses_large():
    with pytest.raises(Refused):
        optimum_cost(build_path(list(range(1, 6))), [1], k=1)


def test_optimum_empty_sequence():
    assert optimum_cost(build_path([1, 2]), [], k=1) == 0


def test_optimum_never_beaten_by_explicit_run():
    # a hand trace is an upper bound for the oracle
    tree = build_path([1, 2, 3])
    m = init_machine(tree.clone(), 1)
    cost = m.run_access(2, [(1, Opcode.MoveRight), (1, Opcode.MoveLeft),
                            (1, Opcode.Serve)])
    assert optimum_cost(tree, [2], k=1) <= cost


def test_count_servable_t0():
    assert count_servable(build_path([1, 2]), k=1, t=0) == 1


def test_count_servable_includes_both_singletons():
    # within cost 2 both [1] and [2] are servable on the two-leaf tree
    count = count_servable(build_path([1, 2]), k=1, t=2)
    assert count >= 3  # (), (1,), (2,)


def test_count_servable_bounded_by_counting_argument():
    tree = build_path([1, 2])
    for t in range(4):
        assert count_servable(tree, k=1, t=t) <= 10 ** t


def test_wilber_examples():
    assert wilber_bound(1, 10, 1) == pytest.approx(1.0)
    assert wilber_bound(16, 16, 1) == pytest.approx(16 * math.log10(16))
    assert wilber_bound(7, 1, 3) == 0.0


def test_tiny_theorem2_witness():
    # sanity: the worst length-2 sequence on n=3 costs at least the bound
    tree = build_path([1, 2, 3])
    worst = max(optimum_cost(tree, list(seq), k=1)
                for seq in itertools.product([1, 2, 3], repeat=2))
    assert worst >= wilber_bound(2, 3, 1)


# ----------------------------------------------------------------------
# array server


def test_array_empty():
    report = array_offline([], 3)
    assert report.total == 0


def test_array_alternating():
    report = array_offline([1, 2, 1, 2], 2)
    assert len(report.per_access) == 4
    assert all(1 <= ops <= 2 for ops in report.per_access)
    assert len(report.per_round_preprocess) == 2


def test_array_triple_repeat():
    report = array_offline([3, 3, 3], 3)
    assert len(report.per_access) == 3
    # every access is a read plus (for the first two) one reinsertion
    assert report.per_access == [2, 2, 1]


def test_array_random_correct_and_constant():
    rng = random.Random(11)
    n = 20
    seq = [rng.randint(1, n) for _ in range(500)]
    report = array_offline(seq, n)
    assert len(report.per_access) == len(seq)
    assert max(report.per_access) <= 2
    assert sum(report.per_round_preprocess) <= 2 * n * (len(seq) // n + 1)


# ----------------------------------------------------------------------
# persistent-finger distances


def test_distance_single_leaf():
    tree = build_path([1])
    hist = finger_distance_profile(tree, [tree.root])
    assert hist == {0: 1}


def test_distance_path_of_eight():
    tree = build_path(list(range(1, 9)))
    hist = finger_distance_profile(tree, [tree.root])
    threshold = math.log2(8) - math.log2(1) - math.log2(3)
    assert far_node_count(hist, threshold) >= 4


def test_distance_bound_random_trials():
    rng = random.Random(1234)
    for n in (8, 64):
        for k in (1, 4, int(math.isqrt(n))):
            for _ in range(50):
                tree = random_tree(n, rng)
                nodes = list(tree.nodes)
                fingers = [rng.choice(nodes) for _ in range(k)]
                assert check_persistent_finger_bound(tree, fingers)


def test_histogram_counts_all_nodes():
    rng = random.Random(5)
    tree = random_tree(10, rng)
    hist = finger_distance_profile(tree, [tree.root])
    assert sum(hist.values()) == len(tree.nodes)
