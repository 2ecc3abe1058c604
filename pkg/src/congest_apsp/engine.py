"""Synchronous CONGEST round engine.

A node program is an object with `start(net)` (round 0) and
`step(net, node, rnd, inbox)`. Programs keep per-node state in lists indexed by
node ID and only ever touch the entry of the node being stepped.

Each directed edge has a FIFO queue shared by all programs of one composition,
drained round-robin over programs, one message per edge per round.

Two timing modes:

* lockstep programs see the exact synchronous semantics of running alone: the
  program's round v+1 fires only once every message it sent in round v has
  crossed its edge. Under congestion the program stretches in real time but
  its behaviour (and output) is identical to the standalone run.
* event-driven programs (lockstep = False) step whenever a message arrives,
  with `rnd` equal to the real round. Used for pipelined upcasts, relays and
  asynchronous Bellman-Ford, whose results do not depend on timing.
"""
from __future__ import annotations

import logging
import math
import random
from collections import Counter, OrderedDict, deque
from dataclasses import dataclass, field
from enum import IntEnum

from .errors import BandwidthViolation, CongestError, NonQuiescent
from .graph import WeightedDigraph

log = logging.getLogger(__name__)


class Tag(IntEnum):
    FLOOD = 0
    DIST = 1
    JOIN = 2
    CLAIM = 3
    HEIGHT = 4
    ECC = 5
    UP = 6
    DOWN = 7
    TABLE = 8
    BFS = 9
    REPAIR = 10
    SINKDIST = 11
    TREE = 12
    CHILD = 13
    COUNT = 14
    COVER = 15
    RECORD = 16
    CHECK = 17
    TOKEN = 18


TAG_BITS = (len(Tag) - 1).bit_length()


def log2_ceil(n: int) -> int:
    return max(2, math.ceil(math.log2(max(n, 2))))


def payload_bits(payload: tuple) -> int:
    return TAG_BITS + sum(x.bit_length() or 1 for x in payload[1:])


@dataclass
class RoundStats:
    rounds_total: int = 0
    messages_total: int = 0
    rounds_by_phase: dict = field(default_factory=dict)
    max_edge_congestion_by_phase: dict = field(default_factory=dict)
    messages_by_phase: dict = field(default_factory=dict)

    def record(self, phase: str, rounds: int, congestion: int, messages: int) -> None:
        self.rounds_total += rounds
        self.messages_total += messages
        self.rounds_by_phase[phase] = self.rounds_by_phase.get(phase, 0) + rounds
        self.messages_by_phase[phase] = self.messages_by_phase.get(phase, 0) + messages
        prev = self.max_edge_congestion_by_phase.get(phase, 0)
        self.max_edge_congestion_by_phase[phase] = max(prev, congestion)

    def merge(self, other: "RoundStats") -> None:
        for phase, r in other.rounds_by_phase.items():
            self.record(phase, r, other.max_edge_congestion_by_phase.get(phase, 0),
                        other.messages_by_phase.get(phase, 0))

    def copy(self) -> "RoundStats":
        out = RoundStats()
        out.merge(self)
        return out

    def delta(self, earlier: "RoundStats") -> "RoundStats":
        """Counters accumulated since `earlier` (congestion is the running max)."""
        out = RoundStats()
        for phase, r in self.rounds_by_phase.items():
            dr = r - earlier.rounds_by_phase.get(phase, 0)
            dm = self.messages_by_phase.get(phase, 0) - earlier.messages_by_phase.get(phase, 0)
            if dr or dm:
                out.record(phase, dr, self.max_edge_congestion_by_phase.get(phase, 0), dm)
        return out

    def to_json(self) -> dict:
        phases = {
            p: {
                "rounds": self.rounds_by_phase[p],
                "max_edge_congestion": self.max_edge_congestion_by_phase.get(p, 0),
                "messages": self.messages_by_phase.get(p, 0),
            }
            for p in sorted(self.rounds_by_phase)
        }
        return {"phases": phases,
                "totals": {"rounds": self.rounds_total, "messages": self.messages_total}}


class NodeProgram:
    lockstep = True

    def start(self, net: "Net") -> None:
        pass

    def step(self, net: "Net", node: int, rnd: int, inbox: list) -> None:
        pass


@dataclass
class ComposeReport:
    rounds: int
    messages: int
    max_edge_congestion: int
    dilations: list
    congestions: list

    @property
    def dilation(self) -> int:
        return max(self.dilations, default=0)


class _Slot:
    __slots__ = ("program", "pid", "lockstep", "vround", "inflight", "inbox", "wakes",
                 "last", "log", "net")

    def __init__(self, program, pid):
        self.program = program
        self.pid = pid
        self.lockstep = program.lockstep
        self.vround = 0
        self.inflight = 0
        self.inbox = {}
        self.wakes = {}
        self.last = 0
        self.log = []
        self.net = None


class Net:
    """The handle a program uses to talk to the engine.

    This base class serves a composition of a single program: one plain FIFO
    per directed edge. `_MultiNet` adds per-program queues.
    """

    __slots__ = ("graph", "n", "_slot", "_queues", "_adj", "_nbrs", "_limit", "_log")

    def __init__(self, engine: "RoundEngine", slot: _Slot, queues):
        self.graph = engine.graph
        self.n = engine.n
        self._slot = slot
        self._queues = queues
        self._adj = engine.graph.out
        self._nbrs = [engine.graph.neighbors(u) for u in range(engine.n)]
        self._limit = engine.bandwidth
        self._log = slot.log  # edge key of every send, tallied after the phase

    @property
    def round(self) -> int:
        return self._slot.vround

    def _check(self, payload):
        bits = TAG_BITS
        for x in payload[1:]:
            bits += x.bit_length() or 1
        if bits > self._limit:
            raise BandwidthViolation(f"payload {payload} needs {bits} bits > {self._limit}")

    def _enqueue(self, ek: int, payload: tuple) -> None:
        q = self._queues.get(ek)
        if q is None:
            self._queues[ek] = deque((payload,))
        else:
            q.append(payload)

    def send(self, u: int, v: int, payload: tuple) -> None:
        if v not in self._adj[u]:
            raise CongestError(f"node {u} tried to message non-neighbour {v}")
        self._check(payload)
        ek = u * self.n + v
        self._enqueue(ek, payload)
        self._log.append(ek)
        self._slot.inflight += 1

    def multicast(self, u: int, targets, payload: tuple) -> None:
        """The same payload to each neighbour in `targets`."""
        adj = self._adj[u]
        for v in targets:
            if v not in adj:
                raise CongestError(f"node {u} tried to message non-neighbour {v}")
        self._send_keys(u, [u * self.n + v for v in targets], payload)

    def send_all(self, u: int, payload: tuple, exclude=()) -> None:
        base = u * self.n
        self._send_keys(u, [base + v for v in self._nbrs[u] if v not in exclude], payload)

    def _send_keys(self, u, keys, payload):
        self._check(payload)
        enqueue = self._enqueue
        for ek in keys:
            enqueue(ek, payload)
        self._log.extend(keys)
        self._slot.inflight += len(keys)

    def wake(self, u: int, rnd: int) -> None:
        slot = self._slot
        if rnd <= slot.vround:
            raise CongestError(f"wake-up for round {rnd} requested in round {slot.vround}")
        s = slot.wakes.get(rnd)
        if s is None:
            slot.wakes[rnd] = {u}
        else:
            s.add(u)


class _MultiNet(Net):
    __slots__ = ()

    def _enqueue(self, ek: int, payload: tuple) -> None:
        # one FIFO per program on this edge, served round-robin
        q = self._queues.get(ek)
        if q is None:
            q = self._queues[ek] = OrderedDict()
        pid = self._slot.pid
        dq = q.get(pid)
        if dq is None:
            q[pid] = deque((payload,))
        else:
            dq.append(payload)


class RoundEngine:
    """Holds the communication graph, the bit budget and the round statistics.

    `auditor`, when set, is called after every round as
    auditor(engine, phase, round, [(src, dst, payload), ...]) with that round's
    deliveries. Tests use it to check the model contract independently.
    """

    auditor = None

    def __init__(self, graph: WeightedDigraph, *, bandwidth_factor: int = 8, seed: int = 0):
        self.graph = graph
        self.n = graph.n
        self.bandwidth_factor = bandwidth_factor
        self.bandwidth = bandwidth_factor * log2_ceil(graph.n)
        self.seed = seed
        self.stats = RoundStats()
        self.round = 0
        self.tree = None
        self.reports: list[tuple[str, ComposeReport]] = []

    def node_rng(self, u: int) -> random.Random:
        return random.Random(f"{self.seed}/{u}")

    def run(self, program: NodeProgram, phase: str, max_rounds: int | None = None) -> ComposeReport:
        return self.compose([program], phase, max_rounds)

    def compose(self, programs, phase: str, max_rounds: int | None = None) -> ComposeReport:
        n = self.n
        if max_rounds is None:
            max_rounds = 64 * n * n + 4096
        queues: dict = {}
        multi = len(programs) > 1
        net_cls = _MultiNet if multi else Net
        slots = [_Slot(p, i) for i, p in enumerate(programs)]
        for slot in slots:
            slot.net = net_cls(self, slot, queues)
            slot.program.start(slot.net)
        live = [s for s in slots if s.inflight or s.wakes]
        R = 0
        while live:
            if not queues:
                # nothing on the wire: skip idle rounds up to the next wake-up
                gap = min(min(s.wakes) - s.vround for s in live) - 1
                if gap > 0:
                    R += gap
                    for s in live:
                        s.vround += gap
            R += 1
            if R > max_rounds:
                raise NonQuiescent(f"phase {phase!r} still active after {max_rounds} rounds")
            batch = list(queues)
            delivered = 0
            trace = [] if self.auditor is not None else None
            if multi:
                for ek in batch:
                    q = queues[ek]
                    pid, dq = next(iter(q.items()))
                    payload = dq.popleft()
                    if dq:
                        q.move_to_end(pid)
                    else:
                        del q[pid]
                    if not q:
                        del queues[ek]
                    delivered += 1
                    slot = slots[pid]
                    src, dst = divmod(ek, n)
                    if trace is not None:
                        trace.append((src, dst, payload))
                    box = slot.inbox.get(dst)
                    if box is None:
                        slot.inbox[dst] = [(src, payload)]
                    else:
                        box.append((src, payload))
                    slot.inflight -= 1
            else:
                slot = slots[0]
                inbox = slot.inbox
                for ek in batch:
                    q = queues[ek]
                    payload = q.popleft()
                    if not q:
                        del queues[ek]
                    delivered += 1
                    src, dst = divmod(ek, n)
                    if trace is not None:
                        trace.append((src, dst, payload))
                    box = inbox.get(dst)
                    if box is None:
                        inbox[dst] = [(src, payload)]
                    else:
                        box.append((src, payload))
                slot.inflight -= delivered
            # one pop per distinct edge key: at most one delivery per directed edge
            if delivered != len(batch):
                raise CongestError("more than one delivery on an edge in one round")
            if trace is not None:
                self.auditor(self, phase, R, trace)
            for slot in live:
                if slot.lockstep:
                    if slot.inflight:
                        continue
                    v = slot.vround + 1
                else:
                    v = R
                slot.vround = v
                woken = slot.wakes.pop(v, None)
                inbox = slot.inbox
                if not inbox and not woken:
                    continue
                slot.inbox = {}
                nodes = set(inbox)
                if woken:
                    nodes |= woken
                slot.last = v
                step = slot.program.step
                net = slot.net
                for u in sorted(nodes):
                    step(net, u, v, inbox.get(u, ()))
            live = [s for s in live if s.inflight or s.wakes or s.inbox]
        per_prog = [Counter(s.log) for s in slots]
        total = per_prog[0] if not multi else sum(per_prog, Counter())
        congestion = max(total.values(), default=0)
        messages = sum(len(s.log) for s in slots)
        report = ComposeReport(
            rounds=R, messages=messages, max_edge_congestion=congestion,
            dilations=[s.last for s in slots],
            congestions=[max(c.values(), default=0) for c in per_prog])
        self.round += R
        self.stats.record(phase, R, congestion, messages)
        self.reports.append((phase, report))
        log.debug("phase %s: %d rounds, %d messages, congestion %d", phase, R, messages, congestion)
        return report
