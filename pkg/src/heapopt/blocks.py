"""Serving block-permuted access sequences in linear total cost.

The input is the concatenation C_1..C_b over n = b*b keys, where C_i is
block B_i = [(i-1)b+1 .. ib] either sorted or with a fixed permutation
applied.  The server turns the initial path into a row/column workbench
during the first access of C_2 and then serves every access by popping the
path head onto a spent-block bank:

* C_1 is served by front pops directly (its block is the path prefix);
  if permuted, one in-place leaf permutation fixes the prefix first.
* Interior rows 2..b-1 that need the permutation are transposed onto a
  ladder of column cells (built from the spent C_1 blocks plus one
  sacrificial row-b block), the column stacks are reordered by the
  permutation, and rows are reassembled onto the path front.  Rows that
  keep their sorted order ride through a stash on the bank side.
* The last row is permuted in place (leaf swaps), since its tail leaf and
  the sacrificial placeholder cannot join the ladder.

Every phase moves each element O(1) times with O(1) finger hops, so the
total cost stays below C_BLK * n.
"""

from __future__ import annotations

from dataclasses import dataclass

from .gadgets import Recorder, block_of, chain_keys
from .machine import Machine, Trace, trace_for
from .tree import LEFT, RIGHT, InvalidInput, build_path

C_BLK = 48  # advertised constant for the linear total-cost bound


@dataclass(frozen=True)
class BlockSpec:
    b: int
    pi: tuple[int, ...]          # permutation of 1..b, 1-based values
    permuted: frozenset[int]     # indices i with C_i = B_i^pi

    def __post_init__(self):
        if self.b < 2:
            raise InvalidInput("need b >= 2")
        if sorted(self.pi) != list(range(1, self.b + 1)):
            raise InvalidInput("pi must be a permutation of 1..b")
        if not all(1 <= i <= self.b for i in self.permuted):
            raise InvalidInput("permuted indices outside 1..b")

    @property
    def n(self) -> int:
        return self.b * self.b


def block_sequence(spec: BlockSpec) -> list[int]:
    """The access sequence C_1 .. C_b induced by the spec."""
    seq: list[int] = []
    for i in range(1, spec.b + 1):
        base = (i - 1) * spec.b
        if i in spec.permuted:
            seq.extend(base + spec.pi[j] for j in range(spec.b))
        else:
            seq.extend(base + j for j in range(1, spec.b + 1))
    return seq


def serve_block_sequence(spec: BlockSpec, seq: list[int], k: int = 2) -> Trace:
    """Emit a machine trace serving seq in C_BLK * n total operations."""
    if k < 2:
        raise InvalidInput("need k >= 2")
    if seq != block_sequence(spec):
        raise InvalidInput("sequence inconsistent with the block spec")
    b, n = spec.b, spec.n
    pi = spec.pi
    interior = sorted(i for i in spec.permuted if 2 <= i <= b - 1)

    tree = build_path(list(range(1, n + 1)))
    trace = trace_for(tree, k)
    machine = Machine(tree, k)
    rec = Recorder(machine)
    root = tree.root
    fa, fw = 1, 2

    def pop_serve(key: int) -> None:
        """Pop the path head onto the bank if it carries key, then serve."""
        rec.begin_access(key)
        leaf = tree.leaf_of(key)
        parent = tree.nodes[leaf].parent
        front = tree.child(root, RIGHT)
        if parent == front and tree.child(front, LEFT) == leaf:
            rec.pop_push(fa, front, RIGHT, fw, root, LEFT)
        rec.goto(fa, leaf)
        rec.serve(fa)

    def row_leaves(i: int) -> list[int]:
        return [tree.leaf_of((i - 1) * b + j) for j in range(1, b + 1)]

    def permute_row_in_place(i: int) -> None:
        """Apply pi to row i's leaves wherever they currently sit."""
        slots = row_leaves(i)
        want = [(i - 1) * b + pi[j] for j in range(b)]
        for pos in range(b):
            if tree.nodes[slots[pos]].key == want[pos]:
                continue
            rec.swap_leaves(fa, fw, tree.leaf_of(want[pos]), slots[pos])
            slots = row_leaves(i)

    # ---- C_1: fix row 1 in place if needed, then pure front pops
    rec.begin_access(seq[0])
    if 1 in spec.permuted:
        permute_row_in_place(1)
    rec.goto(fa, tree.leaf_of(seq[0]))
    rec.serve(fa)
    for t in range(1, b):
        pop_serve(seq[t])

    # ---- first access of C_2: the whole restructuring preamble
    rec.begin_access(seq[b])
    if interior:
        _transpose_interior(rec, spec, interior)
    if b in spec.permuted and b >= 2:
        permute_row_in_place(b)
    rec.goto(fa, tree.leaf_of(seq[b]))
    leaf = tree.leaf_of(seq[b])
    front = tree.child(root, RIGHT)
    if tree.nodes[leaf].parent == front and tree.child(front, LEFT) == leaf:
        rec.goto(fa, root)
        rec.pop_push(fa, front, RIGHT, fw, root, LEFT)
        rec.goto(fa, leaf)
    rec.serve(fa)

    # ---- the rest of the sequence
    for key in seq[b + 1:]:
        pop_serve(key)

    trace.accesses = rec.accesses
    assert rec.cost() <= C_BLK * n, f"block server over budget: {rec.cost()}"
    return trace


def _transpose_interior(rec: Recorder, spec: BlockSpec,
                        interior: list[int]) -> None:
    """Route permuted interior rows through the column ladder."""
    tree = rec.tree
    b = spec.b
    pi = spec.pi
    root = tree.root
    fa, fw = 1, 2
    last_moved = interior[-1]

    # ladder cells: the b-1 spent C_1 blocks plus one sacrificial block of
    # row b (its leaf is served in place later).  Bank blocks must stage
    # through the bank side, so they go bank -> ladder one by one.
    sacrifice = block_of(tree, (b - 1) * b + 1)
    rec.pop_push(fa, sacrifice, RIGHT, fw, root, LEFT)
    for _ in range(b):
        top = tree.child(root, LEFT)
        rec.pop_push(fa, top, RIGHT, fw, root, RIGHT)
    cells = []
    nid = tree.child(root, RIGHT)
    for _ in range(b):
        cells.append(nid)
        nid = tree.child(nid, RIGHT)

    # distribute rows 2..last_moved: permuted rows to column cells (the
    # finger walks the ladder in step), sorted rows to the bank stash
    rows = list(range(2, last_moved + 1))
    for i in rows:
        goes_to_ladder = i in spec.permuted
        for c in range(1, b + 1):
            p = tree.child(cells[-1], RIGHT)
            key = (i - 1) * b + c
            assert tree.nodes[tree.child(p, LEFT)].key == key
            if goes_to_ladder:
                rec.pop_push(fa, p, RIGHT, fw, cells[c - 1], LEFT)
            else:
                rec.pop_push(fa, p, RIGHT, fw, root, LEFT)

    # reorder the column stacks so position c holds column pi(c)
    holder = {c: c for c in range(1, b + 1)}   # column -> position
    content = {c: c for c in range(1, b + 1)}  # position -> column
    for pos in range(1, b + 1):
        want = pi[pos - 1]
        cur = holder[want]
        if cur == pos:
            continue
        rec.swap_slots(fa, cells[pos - 1], LEFT, fw, cells[cur - 1], LEFT)
        other = content[pos]
        holder[want], holder[other] = pos, cur
        content[pos], content[cur] = want, other

    # assemble rows back onto the path front, last row first
    for i in reversed(rows):
        if i in spec.permuted:
            for pos in range(b, 0, -1):
                p = tree.child(cells[pos - 1], LEFT)
                key = (i - 1) * b + pi[pos - 1]
                assert tree.nodes[tree.child(p, LEFT)].key == key
                rec.pop_push(fa, p, RIGHT, fw, cells[-1], RIGHT)
        else:
            for c in range(b, 0, -1):
                p = tree.child(root, LEFT)
                key = (i - 1) * b + c
                assert tree.nodes[tree.child(p, LEFT)].key == key
                rec.pop_push(fa, p, RIGHT, fw, cells[-1], RIGHT)

    # dismantle the ladder; cells return to the bank with their leaves
    for _ in range(b):
        cell = tree.child(root, RIGHT)
        rec.pop_push(fa, cell, RIGHT, fw, root, LEFT)
