"""Ground-truth engines for tiny instances.

optimum_cost does uniform-cost search over canonicalized machine states, so
it is exact but deliberately refuses anything beyond toy size.  The counting
and distance checkers operationalize the two lower-bound arguments, and
array_offline is the n-persistent-pointers reference server.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

from .machine import OPCODES, TRANSIENT, Machine, MachineError, Opcode
from .tree import InvalidInput, TreeStore, validate

MAX_N = 4
MAX_M = 4
MAX_K = 2


class Refused(ValueError):
    """Instance exceeds the oracle's hard-coded search bounds."""


def _check_bounds(n: int, m: int, k: int) -> None:
    if n > MAX_N or m > MAX_M or k > MAX_K:
        raise Refused(
            f"oracle bounded to n<={MAX_N}, m<={MAX_M}, k<={MAX_K}; "
            f"got n={n}, m={m}, k={k}")


def _clone_machine(machine: Machine) -> Machine:
    clone = Machine.__new__(Machine)
    clone.tree = machine.tree.clone()
    clone.k = machine.k
    clone.mode = machine.mode
    clone.fingers = list(machine.fingers)
    clone.temp = machine.temp
    clone.cost = machine.cost
    clone.serves = machine.serves
    clone.pending_key = machine.pending_key
    return clone


def _successors(machine: Machine, key: int | None):
    """All legal one-step successors; Serve only when key is given."""
    for i in range(1, machine.k + 1):
        for op in OPCODES:
            nxt = _clone_machine(machine)
            nxt.pending_key = key if op is Opcode.Serve else None
            try:
                nxt.step(i, op)
            except MachineError:
                continue
            yield op, nxt


def optimum_cost(tree: TreeStore, seq: list[int], k: int,
                 mode: str = TRANSIENT) -> int:
    """Exact minimum total opcode count serving seq in order."""
    if validate(tree):
        raise InvalidInput("invalid tree")
    _check_bounds(tree.n, len(seq), k)
    if not seq:
        return 0
    start = Machine(tree.clone(), k, mode)
    frontier = deque([(start, 0)])
    seen = {(start.canonical_state(), 0)}
    cost = 0
    while frontier:
        nxt_frontier: deque = deque()
        while frontier:
            machine, idx = frontier.popleft()
            for op, succ in _successors(machine, seq[idx]):
                new_idx = idx
                if op is Opcode.Serve:
                    new_idx += 1
                    if new_idx == len(seq):
                        return cost + 1
                    succ.begin_access(seq[new_idx])
                    succ.pending_key = None
                state = (succ.canonical_state(), new_idx)
                if state in seen:
                    continue
                seen.add(state)
                nxt_frontier.append((succ, new_idx))
        frontier = nxt_frontier
        cost += 1
    raise RuntimeError("sequence not servable (should be impossible)")


def count_servable(tree: TreeStore, k: int, t: int) -> int:
    """Distinct access sequences servable within total cost <= t.

    The empty sequence counts.  Always bounded by (10k)^t: each served
    sequence is reconstructible from its (finger, opcode) encoding.
    """
    if validate(tree):
        raise InvalidInput("invalid tree")
    _check_bounds(tree.n, t, k)
    start = Machine(tree.clone(), k, TRANSIENT)
    served: set[tuple[int, ...]] = {()}
    frontier = [(start, ())]
    seen = {(start.canonical_state(), ())}
    for _ in range(t):
        nxt = []
        for machine, seq in frontier:
            for key in range(1, tree.n + 1):
                for op, succ in _successors(machine, key):
                    new_seq = seq
                    if op is Opcode.Serve:
                        new_seq = seq + (key,)
                        served.add(new_seq)
                        succ.begin_access(0)
                        succ.pending_key = None
                    elif key != 1:
                        continue  # non-serve steps do not depend on key
                    state = (succ.canonical_state(), new_seq)
                    if state in seen:
                        continue
                    seen.add(state)
                    nxt.append((succ, new_seq))
        frontier = nxt
    return len(served)


def wilber_bound(m: int, n: int, k: int) -> float:
    """Counting lower bound m * log_{10k}(n) on total serving cost."""
    if n < 1 or m < 1 or k < 1:
        raise InvalidInput("need n, m, k >= 1")
    if n == 1:
        return 0.0
    return m * math.log(n) / math.log(10 * k)


# ----------------------------------------------------------------------
# array-based reference server


@dataclass
class ArrayServerReport:
    """Op counts for the round-based array server."""

    per_access: list[int]
    per_round_preprocess: list[int]

    @property
    def total(self) -> int:
        return sum(self.per_access) + sum(self.per_round_preprocess)


def array_offline(seq: list[int], n: int) -> ArrayServerReport:
    """Simulate the n-slot array server with per-round preprocessing.

    Rounds are n accesses long.  During round r (0-based, covering times
    k*n+1 .. k*n+n with k=r), slot R[t] holds the element requested at
    round-time t.  Every access is a direct slot read plus at most one
    reinsertion; preprocessing scans all n elements once per round.
    """
    m = len(seq)
    for key in seq:
        if not 1 <= key <= n:
            raise InvalidInput(f"key {key} outside 1..{n}")
    # next occurrence of x strictly after absolute time t, 1-based times
    nxt_after: list[dict[int, int]] = [dict() for _ in range(m + 2)]
    later: dict[int, int] = {}
    for t in range(m, 0, -1):
        nxt_after[t] = later.copy()
        later[seq[t - 1]] = t
    first_occurrence = later

    per_access: list[int] = []
    per_round: list[int] = []
    rounds = -(-m // n) if m else 0
    for r in range(rounds):
        base = r * n
        R: dict[int, int] = {}
        pre_ops = 0
        for x in range(1, n + 1):
            pre_ops += 1
            if base == 0:
                nt = first_occurrence.get(x)
            else:
                nt = nxt_after[base].get(x)
            if nt is not None and nt - base <= n:
                R[nt - base] = x
                pre_ops += 1
        per_round.append(pre_ops)
        for t in range(1, n + 1):
            if base + t > m:
                break
            ops = 1  # the slot read
            x = seq[base + t - 1]
            assert R.get(t) == x, "array server invariant broken"
            j = nxt_after[base + t].get(x)
            if j is not None and j - base <= n:
                R[j - base] = x
                ops += 1
            per_access.append(ops)
    return ArrayServerReport(per_access=per_access,
                             per_round_preprocess=per_round)


# ----------------------------------------------------------------------
# persistent-finger distance lemma


def finger_distance_profile(tree: TreeStore, fingers: list[int]) -> dict[int, int]:
    """Histogram of shortest undirected tree distance to the nearest finger."""
    if not fingers:
        raise InvalidInput("need at least one finger")
    for f in fingers:
        if f not in tree.nodes:
            raise InvalidInput(f"finger position {f} not in tree")
    dist: dict[int, int] = {}
    frontier = deque()
    for f in set(fingers):
        dist[f] = 0
        frontier.append(f)
    while frontier:
        nid = frontier.popleft()
        node = tree.nodes[nid]
        for nb in (node.parent, node.left, node.right):
            if nb is not None and nb not in dist:
                dist[nb] = dist[nid] + 1
                frontier.append(nb)
    histogram: dict[int, int] = {}
    for nid in tree.nodes:
        histogram[dist[nid]] = histogram.get(dist[nid], 0) + 1
    return histogram


def far_node_count(histogram: dict[int, int], threshold: float) -> int:
    return sum(count for d, count in histogram.items() if d >= threshold)


def check_persistent_finger_bound(tree: TreeStore, fingers: list[int]) -> bool:
    """At least n/2 nodes lie at distance >= lg n - lg k - lg 3."""
    n = tree.n
    k = len(set(fingers))
    threshold = math.log2(n) - math.log2(k) - math.log2(3)
    histogram = finger_distance_profile(tree, fingers)
    return far_node_count(histogram, threshold) >= n / 2
