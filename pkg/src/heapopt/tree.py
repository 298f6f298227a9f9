"""Id-addressed storage for leaf-oriented binary trees.

Keys live only on leaves; internal nodes are unlabeled apart from a derived
min decoration that is recomputed on demand, never maintained incrementally.
Node ids are stable across restructuring, which lets fingers and traces keep
referring to positions while subtrees move around.

Keyed-block convention: a path over keys [k1..kn] is a chain of internal
nodes, each holding its key's leaf as the *left* child and the continuation
as the *right* child; the final element is a bare leaf.  build_path([1,2,3])
therefore lists 1,2,3 in leaf inorder and key 1 sits at depth 1.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass


class InvalidInput(ValueError):
    """An operation's stated preconditions were violated."""


class KeyNotFound(KeyError):
    pass


LEFT = "L"
RIGHT = "R"


@dataclass(slots=True)
class Node:
    parent: int | None = None
    left: int | None = None
    right: int | None = None
    key: int | None = None
    min_label: int | None = None

    @property
    def is_leaf(self) -> bool:
        return self.key is not None


class TreeStore:
    """A single mutable world of nodes addressed by integer ids."""

    def __init__(self) -> None:
        self.nodes: dict[int, Node] = {}
        self.root: int | None = None
        self._next_id = 0
        self._leaf_of: dict[int, int] = {}  # key -> leaf node id

    # ------------------------------------------------------------------
    # construction

    def new_leaf(self, key: int) -> int:
        if key in self._leaf_of:
            raise InvalidInput(f"duplicate key {key}")
        nid = self._alloc(Node(key=key))
        self._leaf_of[key] = nid
        return nid

    def new_internal(self) -> int:
        return self._alloc(Node())

    def _alloc(self, node: Node) -> int:
        nid = self._next_id
        self._next_id += 1
        self.nodes[nid] = node
        return nid

    # ------------------------------------------------------------------
    # reading

    def node(self, nid: int) -> Node:
        return self.nodes[nid]

    @property
    def n(self) -> int:
        return len(self._leaf_of)

    def leaf_of(self, key: int) -> int:
        try:
            return self._leaf_of[key]
        except KeyError:
            raise KeyNotFound(key) from None

    def keys(self) -> list[int]:
        return sorted(self._leaf_of)

    def child(self, nid: int, side: str) -> int | None:
        node = self.nodes[nid]
        return node.left if side == LEFT else node.right

    def side_of(self, nid: int) -> str:
        """Which slot of its parent holds nid."""
        parent = self.nodes[self.nodes[nid].parent]
        if parent.left == nid:
            return LEFT
        assert parent.right == nid
        return RIGHT

    def is_ancestor(self, anc: int, nid: int) -> bool:
        """True iff anc lies on the path from nid to the root (inclusive)."""
        cur: int | None = nid
        while cur is not None:
            if cur == anc:
                return True
            cur = self.nodes[cur].parent
        return False

    def depth(self, nid: int) -> int:
        d = 0
        cur = self.nodes[nid].parent
        while cur is not None:
            d += 1
            cur = self.nodes[cur].parent
        return d

    def root_path(self, nid: int) -> list[int]:
        """Node ids from the root down to nid."""
        path = [nid]
        cur = self.nodes[nid].parent
        while cur is not None:
            path.append(cur)
            cur = self.nodes[cur].parent
        path.reverse()
        return path

    # ------------------------------------------------------------------
    # low-level mutation (invariant-checked by callers/machine)

    def set_child(self, parent: int | None, side: str, child: int | None) -> None:
        if parent is None:
            self.root = child
            if child is not None:
                self.nodes[child].parent = None
            return
        node = self.nodes[parent]
        if side == LEFT:
            node.left = child
        else:
            node.right = child
        if child is not None:
            self.nodes[child].parent = parent

    def clone(self) -> "TreeStore":
        other = TreeStore()
        other.root = self.root
        other._next_id = self._next_id
        other._leaf_of = dict(self._leaf_of)
        for nid, node in self.nodes.items():
            other.nodes[nid] = Node(node.parent, node.left, node.right,
                                    node.key, node.min_label)
        return other


# ----------------------------------------------------------------------
# spec operations


def build_path(keys: list[int]) -> TreeStore:
    """Build the keyed-block path for keys, in the given head-to-tail order."""
    if not keys:
        raise InvalidInput("keys must be nonempty")
    if len(set(keys)) != len(keys):
        raise InvalidInput("keys must be distinct")
    tree = TreeStore()
    if len(keys) == 1:
        tree.root = tree.new_leaf(keys[0])
        return tree
    blocks = [tree.new_internal() for _ in keys[:-1]]
    leaves = [tree.new_leaf(k) for k in keys]
    tree.root = blocks[0]
    for i, blk in enumerate(blocks):
        tree.set_child(blk, LEFT, leaves[i])
        if i + 1 < len(blocks):
            tree.set_child(blk, RIGHT, blocks[i + 1])
        else:
            tree.set_child(blk, RIGHT, leaves[-1])
    return tree


def validate(tree: TreeStore) -> list[str]:
    """Report invariant violations; an empty report means the tree is valid."""
    problems: list[str] = []
    if tree.root is None:
        return ["tree has no root"]
    if tree.root not in tree.nodes:
        return [f"root {tree.root} not in store"]
    if tree.nodes[tree.root].parent is not None:
        problems.append("root has a parent")

    seen: set[int] = set()
    stack = [tree.root]
    while stack:
        nid = stack.pop()
        if nid in seen:
            problems.append(f"node {nid} reached twice (cycle or shared child)")
            continue
        seen.add(nid)
        node = tree.nodes.get(nid)
        if node is None:
            problems.append(f"dangling child pointer to {nid}")
            continue
        for side, cid in ((LEFT, node.left), (RIGHT, node.right)):
            if cid is None:
                continue
            if node.is_leaf:
                problems.append(f"leaf {nid} has a child")
                continue
            child = tree.nodes.get(cid)
            if child is None:
                problems.append(f"node {nid} points to missing child {cid}")
                continue
            if child.parent != nid:
                problems.append(
                    f"child {cid} does not list {nid} as parent")
            stack.append(cid)

    for nid, node in tree.nodes.items():
        if nid not in seen:
            problems.append(f"node {nid} unreachable from root")
    keys = [n.key for n in tree.nodes.values() if n.key is not None]
    expected = set(range(1, len(keys) + 1))
    if len(set(keys)) != len(keys):
        problems.append("duplicate leaf keys")
    elif set(keys) != expected:
        problems.append(f"leaf keys {sorted(keys)} are not 1..{len(keys)}")
    for key, leaf in tree._leaf_of.items():
        node = tree.nodes.get(leaf)
        if node is None or node.key != key:
            problems.append(f"key index stale for {key}")
    return problems


def recompute_min_labels(tree: TreeStore) -> TreeStore:
    """Set every internal node's min label to the min key below it."""
    if validate(tree):
        raise InvalidInput("cannot label an invalid tree")
    order = postorder(tree)
    for nid in order:
        node = tree.nodes[nid]
        if node.is_leaf:
            continue
        mins = []
        for cid in (node.left, node.right):
            if cid is None:
                continue
            child = tree.nodes[cid]
            mins.append(child.key if child.is_leaf else child.min_label)
        mins = [m for m in mins if m is not None]
        node.min_label = min(mins) if mins else None
    return tree


def postorder(tree: TreeStore) -> list[int]:
    out: list[int] = []
    stack: list[tuple[int, bool]] = [(tree.root, False)]
    while stack:
        nid, expanded = stack.pop()
        if expanded:
            out.append(nid)
            continue
        stack.append((nid, True))
        node = tree.nodes[nid]
        for cid in (node.left, node.right):
            if cid is not None:
                stack.append((cid, False))
    return out


def subtree_leaf_counts(tree: TreeStore) -> dict[int, int]:
    counts: dict[int, int] = {}
    for nid in postorder(tree):
        node = tree.nodes[nid]
        if node.is_leaf:
            counts[nid] = 1
        else:
            counts[nid] = sum(counts[c] for c in (node.left, node.right)
                              if c is not None)
    return counts


def find_separator_edges(tree: TreeStore, k: int) -> list[int]:
    """Subtree roots cutting the leaves into <= 2k parts of <= ceil(2n/k).

    Heavy-path greedy: while more than ceil(n/k) leaves remain, walk from
    the root toward the child with more remaining leaves until the count
    drops to at most ceil(n/k), and cut there.  Each cut removes more than
    half the target size, so at most 2k-1 cuts happen; the remainder is
    emitted last as the root.  Parts are read as "leaves under this root
    not under an earlier one".
    """
    if k < 2:
        raise InvalidInput("need k >= 2")
    if validate(tree):
        raise InvalidInput("invalid tree")
    n = tree.n
    if k > n:
        raise InvalidInput("need k <= n")
    target = -(-n // k)  # ceil(n/k)
    counts = subtree_leaf_counts(tree)
    remaining = dict(counts)
    cuts: list[int] = []

    def walk_cut() -> int:
        nid = tree.root
        while remaining[nid] > target:
            node = tree.nodes[nid]
            kids = [c for c in (node.left, node.right)
                    if c is not None and remaining.get(c, 0) > 0]
            kids.sort(key=lambda c: remaining[c], reverse=True)
            nid = kids[0]
        return nid

    while remaining[tree.root] > target:
        cut = walk_cut()
        removed = remaining[cut]
        cuts.append(cut)
        cur: int | None = cut
        while cur is not None:
            remaining[cur] -= removed
            cur = tree.nodes[cur].parent
    cuts.append(tree.root)
    assert len(cuts) <= 2 * k
    return cuts


def separator_parts(tree: TreeStore, cuts: list[int]) -> list[set[int]]:
    """Leaf-key parts induced by find_separator_edges output."""
    taken: set[int] = set()
    parts: list[set[int]] = []
    for nid in cuts:
        part: set[int] = set()
        stack = [nid]
        while stack:
            cur = stack.pop()
            node = tree.nodes[cur]
            if node.is_leaf:
                if node.key not in taken:
                    part.add(node.key)
                continue
            for cid in (node.left, node.right):
                if cid is not None:
                    stack.append(cid)
        taken |= part
        parts.append(part)
    return parts


def inorder_keys(tree: TreeStore) -> list[int]:
    if validate(tree):
        raise InvalidInput("invalid tree")
    out: list[int] = []
    stack: list[int] = [tree.root]
    while stack:
        nid = stack.pop()
        node = tree.nodes[nid]
        if node.is_leaf:
            out.append(node.key)
            continue
        if node.right is not None:
            stack.append(node.right)
        if node.left is not None:
            stack.append(node.left)
    return out


def depth_of_key(tree: TreeStore, key: int) -> int:
    return tree.depth(tree.leaf_of(key))


def path_order(tree: TreeStore) -> list[int]:
    """Decode a keyed-block path into its head-to-tail key order.

    Raises InvalidInput if the tree is not exactly in build_path shape.
    """
    order: list[int] = []
    nid = tree.root
    while True:
        node = tree.nodes[nid]
        if node.is_leaf:
            order.append(node.key)
            return order
        if node.left is None or node.right is None:
            raise InvalidInput("not a keyed-block path (unary node)")
        left = tree.nodes[node.left]
        if not left.is_leaf:
            raise InvalidInput("not a keyed-block path (left child not leaf)")
        order.append(left.key)
        nid = node.right


def balanced_tree(n: int) -> TreeStore:
    """Complete-ish full binary tree over keys 1..n assigned left to right."""
    if n < 1:
        raise InvalidInput("need n >= 1")
    tree = TreeStore()

    def build(lo: int, hi: int) -> int:
        if lo == hi:
            return tree.new_leaf(lo)
        mid = (lo + hi) // 2
        nid = tree.new_internal()
        tree.set_child(nid, LEFT, build(lo, mid))
        tree.set_child(nid, RIGHT, build(mid + 1, hi))
        return nid

    tree.root = build(1, n)
    tree.nodes[tree.root].parent = None
    return tree


def random_tree(n: int, rng: random.Random) -> TreeStore:
    """Uniform-ish random full binary tree shape with shuffled keys."""
    keys = list(range(1, n + 1))
    rng.shuffle(keys)
    tree = TreeStore()

    def build(ks: list[int]) -> int:
        if len(ks) == 1:
            return tree.new_leaf(ks[0])
        cut = rng.randint(1, len(ks) - 1)
        nid = tree.new_internal()
        tree.set_child(nid, LEFT, build(ks[:cut]))
        tree.set_child(nid, RIGHT, build(ks[cut:]))
        return nid

    tree.root = build(keys)
    tree.nodes[tree.root].parent = None
    return tree


# ----------------------------------------------------------------------
# serialization


def tree_to_json(tree: TreeStore) -> dict:
    nodes = []
    for nid in sorted(tree.nodes):
        node = tree.nodes[nid]
        entry: dict = {"id": nid, "parent": node.parent,
                       "left": node.left, "right": node.right}
        if node.key is not None:
            entry["key"] = node.key
        nodes.append(entry)
    return {"root": tree.root, "nodes": nodes}


def tree_from_json(data: dict) -> TreeStore:
    tree = TreeStore()
    for entry in data["nodes"]:
        node = Node(parent=entry.get("parent"), left=entry.get("left"),
                    right=entry.get("right"), key=entry.get("key"))
        tree.nodes[entry["id"]] = node
        if node.key is not None:
            if node.key in tree._leaf_of:
                raise InvalidInput(f"duplicate key {node.key} in JSON tree")
            tree._leaf_of[node.key] = entry["id"]
    tree.root = data["root"]
    tree._next_id = max(tree.nodes, default=-1) + 1
    problems = validate(tree)
    if problems:
        raise InvalidInput("invalid tree JSON: " + "; ".join(problems))
    return tree


def tree_to_text(tree: TreeStore) -> str:
    """Nested parenthesized form; '_' marks a missing child slot."""

    def render(nid: int | None) -> str:
        if nid is None:
            return "_"
        node = tree.nodes[nid]
        if node.is_leaf:
            return str(node.key)
        return f"({render(node.left)} {render(node.right)})"

    return render(tree.root)


def tree_from_text(text: str) -> TreeStore:
    tokens = text.replace("(", " ( ").replace(")", " ) ").split()
    tree = TreeStore()
    pos = 0

    def parse() -> int | None:
        nonlocal pos
        tok = tokens[pos]
        pos += 1
        if tok == "_":
            return None
        if tok == "(":
            nid = tree.new_internal()
            left = parse()
            right = parse()
            if tokens[pos] != ")":
                raise InvalidInput("malformed tree text")
            pos += 1
            tree.set_child(nid, LEFT, left)
            tree.set_child(nid, RIGHT, right)
            return nid
        return tree.new_leaf(int(tok))

    tree.root = parse()
    if pos != len(tokens):
        raise InvalidInput("trailing tokens in tree text")
    if tree.root is not None:
        tree.nodes[tree.root].parent = None
    problems = validate(tree)
    if problems:
        raise InvalidInput("invalid tree text: " + "; ".join(problems))
    return tree


def dumps(tree: TreeStore) -> str:
    return json.dumps(tree_to_json(tree), separators=(",", ":"))


def loads(text: str) -> TreeStore:
    return tree_from_json(json.loads(text))
