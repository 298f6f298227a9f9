"""Recording machine and the swap choreography shared by trace generators.

Trees reachable from build_path starts are always full binary (n leaves,
n-1 internal nodes, no null slots), so all restructuring happens through
subtree swaps.  The one reusable move is the block dance in pop_push:
splice an internal node P together with its leaf child out of anywhere in
the tree and push it onto a "collector" slot elsewhere, healing the source
in the same six opcodes.  Everything else is finger navigation.
"""

from __future__ import annotations

from .machine import Machine, Opcode
from .tree import LEFT, RIGHT, TreeStore


class Recorder:
    """Drives a Machine while collecting the (finger, opcode) stream."""

    def __init__(self, machine: Machine):
        self.machine = machine
        self.tree: TreeStore = machine.tree
        self.ops: list[tuple[int, str]] = []
        self.accesses: list[tuple[int, list[tuple[int, str]]]] = []
        self._access_start = 0
        self._access_key: int | None = None

    # ------------------------------------------------------------------
    # raw steps

    def do(self, i: int, op: Opcode) -> None:
        self.machine.step(i, op)
        self.ops.append((i, op.value))

    def cost(self) -> int:
        return len(self.ops)

    # ------------------------------------------------------------------
    # access assembly (for full traces)

    def begin_access(self, key: int) -> None:
        assert self._access_key is None, "previous access still open"
        self.machine.begin_access(key)
        self._access_key = key
        self._access_start = len(self.ops)

    def serve(self, i: int) -> None:
        assert self._access_key is not None, "no access open"
        self.do(i, Opcode.Serve)
        self.accesses.append(
            (self._access_key, self.ops[self._access_start:]))
        self._access_key = None

    # ------------------------------------------------------------------
    # navigation

    def where(self, i: int) -> int:
        return self.machine.finger(i)

    def goto(self, i: int, target: int) -> int:
        """Move finger i to target along the tree path; returns ops used."""
        cur = self.machine.finger(i)
        if cur == target:
            return 0
        node = self.tree.nodes[cur]
        if node.parent == target:
            self.do(i, Opcode.MoveParent)
            return 1
        if node.left == target:
            self.do(i, Opcode.MoveLeft)
            return 1
        if node.right == target:
            self.do(i, Opcode.MoveRight)
            return 1
        cur_path = self.tree.root_path(cur)
        tgt_path = self.tree.root_path(target)
        lca_depth = 0
        for a, b in zip(cur_path, tgt_path):
            if a != b:
                break
            lca_depth += 1
        used = 0
        for _ in range(len(cur_path) - lca_depth):
            self.do(i, Opcode.MoveParent)
            used += 1
        for nid in tgt_path[lca_depth:]:
            node = self.tree.nodes[self.machine.finger(i)]
            if node.left == nid:
                self.do(i, Opcode.MoveLeft)
            else:
                assert node.right == nid, "navigation lost"
                self.do(i, Opcode.MoveRight)
            used += 1
        assert self.machine.finger(i) == target
        return used

    def set_temp(self, i: int, target: int) -> None:
        self.goto(i, target)
        self.do(i, Opcode.CopyToTemp)

    def swap_with_child(self, i: int, side: str) -> None:
        self.do(i, Opcode.SwapTempWithLeftChild if side == LEFT
                else Opcode.SwapTempWithRightChild)

    # ------------------------------------------------------------------
    # the block dance

    def pop_push(self, fa: int, p: int, rest_side: str,
                 fw: int, w: int, w_side: str) -> None:
        """Splice block p out (healing with its rest_side child) and push it
        on top of the collector slot (w, w_side).

        Preconditions: p has a leaf child opposite rest_side, p is not the
        root, and the collector content is disjoint from p's subtree.
        Finger fa ends at p's former parent, fw stays at w.
        """
        assert fa != fw, "the dance needs two distinct fingers"
        tree = self.tree
        node = tree.nodes[p]
        rest = tree.child(p, rest_side)
        leaf_side = LEFT if rest_side == RIGHT else RIGHT
        leaf = tree.child(p, leaf_side)
        assert rest is not None and leaf is not None, "p is not a block"
        assert tree.nodes[leaf].is_leaf, "block leaf child missing"
        assert tree.nodes[p].parent is not None, "cannot pop the root"
        collector = tree.child(w, w_side)
        assert collector is not None, "collector slot empty"
        assert not tree.is_ancestor(p, collector), "collector inside source"
        assert not tree.is_ancestor(collector, p), "source inside collector"
        assert not tree.is_ancestor(p, w), "w inside source subtree"

        self.goto(fw, w)
        self.set_temp(fa, rest)            # temp := rest subtree
        self.do(fa, Opcode.MoveParent)     # fa at p
        self.swap_with_child(fw, w_side)   # collector <-> rest
        self.do(fa, Opcode.CopyToTemp)     # temp := block p (now closed)
        self.do(fa, Opcode.MoveParent)     # fa at p's parent
        self.swap_with_child(fw, w_side)   # block p onto collector; heal

        assert tree.child(w, w_side) == p
        assert tree.child(p, rest_side) == collector

    def swap_slots(self, fa: int, a_parent: int, a_side: str,
                   fw: int, b_parent: int, b_side: str) -> None:
        """Exchange the contents of two disjoint child slots."""
        tree = self.tree
        a = tree.child(a_parent, a_side)
        b = tree.child(b_parent, b_side)
        assert a is not None and b is not None
        assert not tree.is_ancestor(a, b) and not tree.is_ancestor(b, a)
        self.set_temp(fa, a)
        self.goto(fw, b_parent)
        self.swap_with_child(fw, b_side)
        assert tree.child(b_parent, b_side) == a

    def swap_leaves(self, fa: int, fw: int, leaf_a: int, leaf_b: int) -> None:
        """Exchange two leaves' positions."""
        if leaf_a == leaf_b:
            return
        tree = self.tree
        pb = tree.nodes[leaf_b].parent
        side_b = tree.side_of(leaf_b)
        self.set_temp(fa, leaf_a)
        self.goto(fw, pb)
        self.swap_with_child(fw, side_b)


# ----------------------------------------------------------------------
# chain reading helpers (free: the offline algorithm may inspect the tree)


def chain_blocks(tree: TreeStore, head: int) -> tuple[list[int], int]:
    """Decode a keyed-block chain: block node ids plus the bare tail leaf."""
    blocks: list[int] = []
    nid = head
    while True:
        node = tree.nodes[nid]
        if node.is_leaf:
            return blocks, nid
        left = tree.nodes[node.left] if node.left is not None else None
        assert left is not None and left.is_leaf, "not a chain"
        blocks.append(nid)
        nid = node.right


def chain_keys(tree: TreeStore, head: int) -> list[int]:
    blocks, tail = chain_blocks(tree, head)
    keys = [tree.nodes[tree.nodes[b].left].key for b in blocks]
    keys.append(tree.nodes[tail].key)
    return keys


def is_chain(tree: TreeStore, head: int) -> bool:
    nid = head
    while True:
        node = tree.nodes[nid]
        if node.is_leaf:
            return True
        if node.left is None or node.right is None:
            return False
        if not tree.nodes[node.left].is_leaf:
            return False
        nid = node.right


def block_of(tree: TreeStore, key: int) -> int:
    """The internal node whose leaf child carries key (chain block)."""
    leaf = tree.leaf_of(key)
    parent = tree.nodes[leaf].parent
    assert parent is not None
    return parent
