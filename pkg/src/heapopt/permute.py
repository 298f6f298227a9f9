"""Rearranging a tournament tree into a path ordered by next request.

The sort is a bottom-up multiway mergesort on keyed-block chains, run
entirely through subtree swaps:

* pathify: peel bottom blocks off an arbitrary tree until it is one chain;
* rig: splice a+1 blocks out of the chain; their internal nodes become a
  ladder of cells (one collector slot plus a run slots), their leaves stay
  put as empty-run placeholders;
* passes: carve the next a runs onto the rig (reversing them), then merge
  by popping the best run head onto the collector, healing as we go;
* dismantle: the rig cells pop back as ordinary blocks and two cleanup
  swaps hand back one sorted chain.

Merge arity is a = k-2 with one roaming finger, one collector finger and a
parked run fingers when k >= 4, else a = 2 with two shared fingers.  Cost
stays within C_PERM * n * (floor(log_k n) + 1) on the tested grids; tiny
inputs skip the rig and permute leaves in place instead.
"""

from __future__ import annotations

from .annotate import first_access_order
from .gadgets import Recorder, block_of, chain_blocks, chain_keys, is_chain
from .machine import Machine
from .tree import LEFT, RIGHT, InvalidInput, TreeStore

C_PERM = 24  # advertised constant for the n*(floor(log_k n)+1) cost bound


def merge_arity(n: int) -> int:
    """Runs merged per group.  The dance needs only two fingers regardless,
    so arity trades rig navigation against pass count; ~15 is the sweet
    spot and small inputs shrink to whatever the rig can fund."""
    return min(15, max(2, n - 4))


SMALL_LIMIT = 12  # below this, permute leaves in place instead of rigging


def permute_to_path(machine: Machine, order: list[int]) -> list[tuple[int, str]]:
    """Rearrange the whole tree into a keyed-block path in `order`.

    Returns the opcode fragment (no Serve ops).  The machine is mutated.
    """
    if machine.k < 2:
        raise InvalidInput("permute needs at least 2 fingers")
    tree = machine.tree
    if sorted(order) != tree.keys():
        raise InvalidInput("order must be a permutation of the tree's keys")
    rec = Recorder(machine)
    _permute_scope(rec, order)
    assert chain_keys(tree, tree.root) == list(order)
    return rec.ops


def segment_preprocess(machine: Machine, segment: list[int]
                       ) -> tuple[list[tuple[int, str]], list[int], list[int]]:
    """Sort requested keys to the front by first access, park the rest below.

    Returns (opcode fragment, requested order, parked keys).
    """
    tree = machine.tree
    requested = first_access_order(segment)
    parked = sorted(set(tree.keys()) - set(requested))
    order = requested + parked
    ops = permute_to_path(machine, order)
    return ops, requested, parked


# ----------------------------------------------------------------------
# internals


def _permute_scope(rec: Recorder, order: list[int],
                   parent: int | None = None, side: str | None = None) -> None:
    tree = rec.tree

    def scope_root() -> int:
        return tree.root if parent is None else tree.child(parent, side)

    n = len(order)
    if n == 0:
        return
    if n == 1:
        assert tree.nodes[scope_root()].key == order[0]
        return
    _pathify(rec, scope_root)
    if n < SMALL_LIMIT:
        _leaf_cycle_sort(rec, scope_root, order)
    else:
        _rig_mergesort(rec, scope_root, order)
    assert chain_keys(tree, scope_root()) == list(order)


def permute_chain_at(rec: Recorder, parent: int, side: str,
                     order: list[int]) -> None:
    """Sort the chain hanging at (parent, side) into `order` (internal API)."""
    _permute_scope(rec, order, parent, side)


def _find_bottom_block(tree: TreeStore, region_root: int) -> int:
    """Deepest-left internal node whose children are both leaves."""
    nid = region_root
    while True:
        node = tree.nodes[nid]
        nxt = None
        for c in (node.left, node.right):
            if c is not None and not tree.nodes[c].is_leaf:
                nxt = c
                break
        if nxt is None:
            return nid
        nid = nxt


def _pathify(rec: Recorder, scope_root, fa: int = 1, fw: int = 2) -> None:
    """Turn the scope into one keyed-block chain (arbitrary key order)."""
    tree = rec.tree
    root = scope_root()
    if tree.nodes[root].is_leaf or is_chain(tree, root):
        return
    # phase 1: reduce the left side to a single leaf, pushing right
    while not tree.nodes[tree.child(root, LEFT)].is_leaf:
        p = _find_bottom_block(tree, tree.child(root, LEFT))
        rec.pop_push(fa, p, RIGHT, fw, root, RIGHT)
    # phase 2: consume the right side bottom-up, pushing left
    while not tree.nodes[tree.child(root, RIGHT)].is_leaf:
        p = _find_bottom_block(tree, tree.child(root, RIGHT))
        rec.pop_push(fa, p, RIGHT, fw, root, LEFT)
    # root now holds (chain-stack, lone leaf); flip to head-block form
    rec.swap_slots(fa, root, LEFT, fw, root, RIGHT)
    assert is_chain(tree, root)


def _chain_leaf_nodes(tree: TreeStore, head: int) -> list[int]:
    blocks, tail = chain_blocks(tree, head)
    leaves = [tree.nodes[b].left for b in blocks]
    leaves.append(tail)
    return leaves


def _leaf_cycle_sort(rec: Recorder, scope_root, order: list[int],
                     fa: int = 1, fw: int = 2) -> None:
    """Permute leaves among fixed chain slots; structure untouched."""
    tree = rec.tree
    for i, want in enumerate(order):
        leaves = _chain_leaf_nodes(tree, scope_root())
        cur = leaves[i]
        if tree.nodes[cur].key == want:
            continue
        rec.swap_leaves(fa, fw, tree.leaf_of(want), cur)


def _rig_mergesort(rec: Recorder, scope_root, order: list[int]) -> None:
    tree = rec.tree
    n = len(order)
    a = merge_arity(n)
    fa, fw = 1, 2
    # spare fingers park on the first run cells and save the inter-cell hops
    parked = list(range(3, min(rec.machine.k, a + 2) + 1))

    # pin first and last ranks onto the head block and the tail slot
    root = scope_root()
    head_leaf = tree.child(root, LEFT)
    if tree.nodes[head_leaf].key != order[0]:
        rec.swap_leaves(fa, fw, tree.leaf_of(order[0]), head_leaf)
    _, tail = chain_blocks(tree, root)
    if tree.nodes[tail].key != order[-1]:
        rec.swap_leaves(fa, fw, tree.leaf_of(order[-1]), tail)

    # rig extraction: blocks of ranks 1..a+1 become the cell ladder.
    # They are staged on the pin side (disjoint from the chain), then two
    # slot swaps tuck the pin leaf back and hang the ladder over the chain.
    rig_ranks = list(range(1, a + 2))
    for j in reversed(rig_ranks):
        p = block_of(tree, order[j])
        rec.pop_push(fa, p, RIGHT, fw, root, LEFT)
    deepest = tree.child(root, LEFT)
    for _ in rig_ranks[1:]:
        deepest = tree.child(deepest, RIGHT)
    rec.swap_slots(fa, deepest, RIGHT, fw, root, RIGHT)
    rec.swap_slots(fa, root, LEFT, fw, root, RIGHT)
    cells = []
    nid = tree.child(root, RIGHT)
    for j in rig_ranks:
        cells.append(nid)
        assert tree.nodes[tree.child(nid, LEFT)].key == order[j]
        nid = tree.child(nid, RIGHT)
    collector = cells[0]
    run_cells = cells[1:]
    master = cells[-1]  # master chain hangs at (master, RIGHT)
    for f, cell in zip(parked, run_cells):
        rec.goto(f, cell)

    rank = {key: i for i, key in enumerate(order)}
    core = chain_keys(tree, tree.child(master, RIGHT))[:-1]
    assert sorted(rank[key] for key in core) == \
        list(range(a + 2, n - 1)), "core ranks off"
    runs: list[list[int]] = [[key] for key in core]

    while len(runs) > 1:
        merged: list[list[int]] = []
        front = 0
        while front < len(runs):
            group = runs[front:front + a]
            front += a
            merged.append(_merge_group(
                rec, group, rank, collector, run_cells, master,
                fa, fw, parked))
        runs = list(reversed(merged))
        if len(runs) > 1:
            rec.swap_slots(fa, collector, LEFT, fw, master, RIGHT)

    # dismantle the rig back into the chain
    for j in range(len(run_cells) - 1, -1, -1):
        rec.pop_push(fa, run_cells[j], RIGHT, fw, collector, LEFT)
    rec.swap_slots(fa, collector, LEFT, fw, collector, RIGHT)
    bottom_leaf = tree.child(collector, LEFT)
    if tree.nodes[bottom_leaf].key != order[1]:
        rec.swap_leaves(fa, fw, tree.leaf_of(order[1]), bottom_leaf)


def _merge_group(rec: Recorder, group: list[list[int]], rank: dict[int, int],
                 collector: int, run_cells: list[int], master: int,
                 fa: int, fw: int, parked: list[int]) -> list[int]:
    """Carve the group's runs onto the rig, then merge onto the collector."""
    tree = rec.tree
    # carve: runs arrive reversed (descending rank from the top)
    for j, run in enumerate(group):
        cell = run_cells[j]
        w_finger = parked[j] if j < len(parked) else fw
        for _ in run:
            p = tree.child(master, RIGHT)
            rec.pop_push(fa, p, RIGHT, w_finger, cell, LEFT)
    # merge: repeatedly pop the highest-rank run head onto the collector
    remaining = [len(run) for run in group]
    idx = [len(run) for run in group]  # next element is run[idx-1]
    total = sum(remaining)
    merged: list[int] = []
    for _ in range(total):
        best = max((j for j in range(len(group)) if remaining[j]),
                   key=lambda j: rank[group[j][idx[j] - 1]])
        cell = run_cells[best]
        a_finger = parked[best] if best < len(parked) else fa
        p = tree.child(cell, LEFT)
        assert tree.nodes[tree.child(p, LEFT)].key == group[best][idx[best] - 1]
        rec.pop_push(a_finger, p, RIGHT, fw, collector, LEFT)
        merged.append(group[best][idx[best] - 1])
        idx[best] -= 1
        remaining[best] -= 1
    merged.reverse()
    assert merged == sorted(merged, key=rank.__getitem__)
    return merged
