"""The ten-opcode finger machine over a TreeStore.

A machine holds k fingers plus the temporary finger F0, executes opcodes at
unit cost each, and refuses illegal steps without mutating state or charging
cost, so legal traces replay bit-identically.

Legality rules beyond plain pointer-following:

* swap: the addressed child must exist, temp must not be the global root,
  and the two subtrees must be disjoint.  temp == child is a costed no-op.
* attach: temp must have a parent (never detach the root), the target slot
  must be empty, and the target node must lie outside temp's subtree.
* serve: the finger must sit on the leaf carrying the requested key.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum

from .tree import LEFT, RIGHT, InvalidInput, TreeStore, tree_from_json, tree_to_json, validate


class Opcode(str, Enum):
    MoveParent = "MoveParent"
    MoveLeft = "MoveLeft"
    MoveRight = "MoveRight"
    CopyToTemp = "CopyToTemp"
    JumpToTemp = "JumpToTemp"
    SwapTempWithLeftChild = "SwapTempWithLeftChild"
    SwapTempWithRightChild = "SwapTempWithRightChild"
    AttachTempAsLeftChild = "AttachTempAsLeftChild"
    AttachTempAsRightChild = "AttachTempAsRightChild"
    Serve = "Serve"


OPCODES = list(Opcode)
assert len(OPCODES) == 10

TRANSIENT = "transient"
PERSISTENT = "persistent"


class MachineError(Exception):
    """An illegal step.  State and cost are untouched when this is raised."""

    def __init__(self, kind: str, message: str = ""):
        self.kind = kind
        super().__init__(f"{kind}: {message}" if message else kind)


NULL_FOLLOW = "null-pointer-follow"
CYCLE = "cycle"
OCCUPIED = "occupied-slot"
ROOT_DETACH = "root-detach"
SERVE_MISMATCH = "serve-mismatch"
MISPLACED_SERVE = "misplaced-serve"
UNSERVED = "unserved-access"


class Machine:
    """TreeStore + k fingers + temp finger + exact opcode cost counter."""

    def __init__(self, tree: TreeStore, k: int, mode: str = TRANSIENT):
        if k < 1:
            raise InvalidInput("need k >= 1")
        if mode not in (TRANSIENT, PERSISTENT):
            raise InvalidInput(f"unknown mode {mode!r}")
        if validate(tree):
            raise InvalidInput("machine needs a valid tree")
        self.tree = tree
        self.k = k
        self.mode = mode
        self.fingers: list[int] = [tree.root] * k  # fingers[i-1] is F_i
        self.temp: int = tree.root                 # F0
        self.cost = 0
        self.serves = 0
        self.pending_key: int | None = None

    # ------------------------------------------------------------------

    def finger(self, i: int) -> int:
        if not 1 <= i <= self.k:
            raise InvalidInput(f"finger index {i} out of range 1..{self.k}")
        return self.fingers[i - 1]

    def reset_fingers(self) -> None:
        root = self.tree.root
        for i in range(self.k):
            self.fingers[i] = root
        self.temp = root

    def begin_access(self, key: int) -> None:
        if self.mode == TRANSIENT:
            self.reset_fingers()
        self.pending_key = key

    def step(self, i: int, op: Opcode) -> None:
        """Execute one opcode for finger i, charging exactly one unit."""
        pos = self.finger(i)
        tree = self.tree
        node = tree.nodes[pos]

        if op is Opcode.MoveParent:
            if node.parent is None:
                raise MachineError(NULL_FOLLOW, "root has no parent")
            self.fingers[i - 1] = node.parent
        elif op is Opcode.MoveLeft:
            if node.left is None:
                raise MachineError(NULL_FOLLOW, "no left child")
            self.fingers[i - 1] = node.left
        elif op is Opcode.MoveRight:
            if node.right is None:
                raise MachineError(NULL_FOLLOW, "no right child")
            self.fingers[i - 1] = node.right
        elif op is Opcode.CopyToTemp:
            self.temp = pos
        elif op is Opcode.JumpToTemp:
            self.fingers[i - 1] = self.temp
        elif op is Opcode.SwapTempWithLeftChild:
            self._swap(pos, LEFT)
        elif op is Opcode.SwapTempWithRightChild:
            self._swap(pos, RIGHT)
        elif op is Opcode.AttachTempAsLeftChild:
            self._attach(pos, LEFT)
        elif op is Opcode.AttachTempAsRightChild:
            self._attach(pos, RIGHT)
        elif op is Opcode.Serve:
            if node.key is None or node.key != self.pending_key:
                raise MachineError(
                    SERVE_MISMATCH,
                    f"finger at {pos} does not hold key {self.pending_key}")
            self.serves += 1
            self.pending_key = None
        else:  # pragma: no cover
            raise InvalidInput(f"unknown opcode {op}")
        self.cost += 1

    def _swap(self, pos: int, side: str) -> None:
        tree = self.tree
        child = tree.child(pos, side)
        if child is None:
            raise MachineError(NULL_FOLLOW, f"no {side} child to swap with")
        temp = self.temp
        if temp == child:
            return  # costed no-op
        if tree.nodes[temp].parent is None:
            raise MachineError(ROOT_DETACH, "temp is the global root")
        if tree.is_ancestor(temp, child) or tree.is_ancestor(child, temp):
            raise MachineError(CYCLE, "swap of nested subtrees")
        t_parent = tree.nodes[temp].parent
        t_side = tree.side_of(temp)
        tree.set_child(pos, side, temp)
        tree.set_child(t_parent, t_side, child)

    def _attach(self, pos: int, side: str) -> None:
        tree = self.tree
        if tree.nodes[pos].is_leaf:
            raise MachineError(NULL_FOLLOW, "leaves have no child slots")
        if tree.child(pos, side) is not None:
            raise MachineError(OCCUPIED, f"{side} slot already occupied")
        temp = self.temp
        if tree.nodes[temp].parent is None:
            raise MachineError(ROOT_DETACH, "temp is the global root")
        if tree.is_ancestor(temp, pos):
            raise MachineError(CYCLE, "target lies inside temp's subtree")
        t_parent = tree.nodes[temp].parent
        t_side = tree.side_of(temp)
        tree.set_child(t_parent, t_side, None)
        tree.set_child(pos, side, temp)

    # ------------------------------------------------------------------

    def run_access(self, key: int, ops: list[tuple[int, Opcode]]) -> int:
        """Reset (transient), execute ops, require a single final Serve."""
        self.begin_access(key)
        last = len(ops) - 1
        for idx, (i, op) in enumerate(ops):
            if op is Opcode.Serve and idx != last:
                raise MachineError(MISPLACED_SERVE,
                                   f"Serve at op {idx} before end of access")
            self.step(i, op)
        if last < 0 or ops[last][1] is not Opcode.Serve:
            raise MachineError(UNSERVED, f"access to {key} never served")
        return len(ops)

    def canonical_state(self):
        """Structural encoding invariant under node renaming."""
        tree = self.tree
        index: dict[int, int] = {}

        def enc(nid):
            index[nid] = len(index)
            node = tree.nodes[nid]
            if node.is_leaf:
                return node.key
            return (enc(node.left) if node.left is not None else None,
                    enc(node.right) if node.right is not None else None)

        shape = enc(tree.root)
        fingers = tuple(index[f] for f in self.fingers)
        return (shape, fingers, index[self.temp])


def init_machine(tree: TreeStore, k: int, mode: str = TRANSIENT) -> Machine:
    return Machine(tree, k, mode)


# ----------------------------------------------------------------------
# traces


@dataclass
class Trace:
    """Initial tree plus the per-access opcode lists that serve a sequence."""

    n: int
    k: int
    mode: str
    tree_json: dict
    accesses: list[tuple[int, list[tuple[int, str]]]] = field(default_factory=list)

    def total_ops(self) -> int:
        return sum(len(ops) for _, ops in self.accesses)

    def to_jsonl(self) -> str:
        lines = [json.dumps({"n": self.n, "k": self.k, "mode": self.mode,
                             "tree": self.tree_json}, separators=(",", ":"))]
        for key, ops in self.accesses:
            lines.append(json.dumps(
                {"key": key, "ops": [[i, name] for i, name in ops]},
                separators=(",", ":")))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_jsonl(cls, text: str) -> "Trace":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise InvalidInput("empty trace file")
        header = json.loads(lines[0])
        trace = cls(n=header["n"], k=header["k"], mode=header["mode"],
                    tree_json=header["tree"])
        for line in lines[1:]:
            entry = json.loads(line)
            ops = [(int(i), str(name)) for i, name in entry["ops"]]
            trace.accesses.append((int(entry["key"]), ops))
        return trace


@dataclass
class CostReport:
    per_access: list[int]
    total: int

    @classmethod
    def from_costs(cls, costs: list[int]) -> "CostReport":
        return cls(per_access=costs, total=sum(costs))


class TraceRejected(Exception):
    def __init__(self, access_index: int, op_index: int, kind: str, message: str):
        self.access_index = access_index
        self.op_index = op_index
        self.kind = kind
        super().__init__(
            f"rejected at access {access_index}, op {op_index}: {kind}: {message}")


def replay_verify(trace: Trace, seq: list[int]) -> CostReport:
    """Replay a trace against a sequence; accept iff every access is legal."""
    if len(trace.accesses) != len(seq):
        raise TraceRejected(0, 0, "length-mismatch",
                            f"trace has {len(trace.accesses)} accesses, "
                            f"sequence has {len(seq)}")
    for key in seq:
        if not 1 <= key <= trace.n:
            raise TraceRejected(0, 0, "universe-mismatch",
                                f"key {key} outside 1..{trace.n}")
    tree = tree_from_json(trace.tree_json)
    if tree.n != trace.n:
        raise TraceRejected(0, 0, "universe-mismatch",
                            f"header n={trace.n} but tree has {tree.n} leaves")
    machine = Machine(tree, trace.k, trace.mode)
    costs: list[int] = []
    for t, ((key, ops), want) in enumerate(zip(trace.accesses, seq)):
        if key != want:
            raise TraceRejected(t, 0, "key-mismatch",
                                f"trace access {key} != sequence {want}")
        machine.begin_access(key)
        last = len(ops) - 1
        for idx, (i, name) in enumerate(ops):
            try:
                op = Opcode(name)
            except ValueError:
                raise TraceRejected(t, idx, "unknown-opcode", name) from None
            if op is Opcode.Serve and idx != last:
                raise TraceRejected(t, idx, MISPLACED_SERVE, "early Serve")
            try:
                machine.step(i, op)
            except (MachineError, InvalidInput) as exc:
                kind = exc.kind if isinstance(exc, MachineError) else "invalid-input"
                raise TraceRejected(t, idx, kind, str(exc)) from None
        if last < 0 or ops[last][1] != Opcode.Serve.value:
            raise TraceRejected(t, max(last, 0), UNSERVED, "no final Serve")
        costs.append(len(ops))
    report = CostReport.from_costs(costs)
    assert report.total == machine.cost
    return report


def trace_for(tree: TreeStore, k: int, mode: str = TRANSIENT) -> Trace:
    return Trace(n=tree.n, k=k, mode=mode, tree_json=tree_to_json(tree))
