"""Constructive route: multiflow formulation, pivot transformation and transportation solve.

An interim rule becomes a multicommodity flow on the complete bipartite graph
T1 -> T2 (one commodity per non-slack alternative, arc capacity = prior of the
profile, slack = the k0 probability). The graph is a suspension with respect
to either type of a binary type space, and deleting the pivot turns the
multiflow into a single-commodity transportation problem whose flows are the
ex post masses ``q^k(t) * lambda(t)``.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterable

from .core import (
    ZERO,
    AssumptionViolated,
    Conic,
    Cut,
    CutTriple,
    ExPostRule,
    Implementable,
    Instance,
    InterimRule,
    Negative,
    NotImplementable,
    complete_with_slack,
    weighted,
)

SLACK = "<slack>"


class UnbalancedProblem(ValueError):
    pass


class NegativeData(ValueError):
    """A supply or demand is negative; the caller should report a Negative violation."""


# -- graphs -------------------------------------------------------------------

def _adjacency(nodes, edges):
    adj = {v: [] for v in nodes}
    for i, (u, w) in enumerate(edges):
        adj[u].append((w, i))
        adj[w].append((u, i))
    return adj


def _connected(nodes, adj) -> bool:
    nodes = list(nodes)
    if not nodes:
        return False
    seen = {nodes[0]}
    stack = [nodes[0]]
    while stack:
        v = stack.pop()
        for w, _ in adj[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(nodes)


def articulation_points(nodes, edges) -> set:
    """Cut vertices of the undirected multigraph (Hopcroft-Tarjan lowpoints)."""
    adj = _adjacency(nodes, edges)
    disc: dict = {}
    low: dict = {}
    points = set()
    counter = 0

    for root in nodes:
        if root in disc:
            continue
        disc[root] = low[root] = counter
        counter += 1
        root_children = 0
        # iterative DFS; frames are (vertex, arriving edge id, neighbour iterator)
        stack = [(root, None, iter(adj[root]))]
        while stack:
            v, via, it = stack[-1]
            advanced = False
            for w, eid in it:
                if eid == via:
                    continue
                if w not in disc:
                    disc[w] = low[w] = counter
                    counter += 1
                    if v == root:
                        root_children += 1
                    stack.append((w, eid, iter(adj[w])))
                    advanced = True
                    break
                low[v] = min(low[v], disc[w])
            if advanced:
                continue
            stack.pop()
            if stack:
                parent = stack[-1][0]
                low[parent] = min(low[parent], low[v])
                if parent != root and low[v] >= disc[parent]:
                    points.add(parent)
        if root_children > 1:
            points.add(root)
    return points


def is_forest(nodes, edges) -> bool:
    parent = {v: v for v in nodes}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for u, w in edges:
        ru, rw = find(u), find(w)
        if ru == rw:
            return False
        parent[ru] = rw
    return True


def is_two_connected(nodes, edges) -> bool:
    """Connected, contains a cycle, and every pair of edges lies on a common cycle."""
    nodes = list(nodes)
    edges = list(edges)
    if len(nodes) < 2 or len(edges) < 2:
        return False
    adj = _adjacency(nodes, edges)
    if not _connected(nodes, adj):
        return False
    if len(nodes) == 2:
        return True  # parallel edges between the two vertices
    return not articulation_points(nodes, edges)


def is_suspension(nodes: Iterable[Hashable], edges: Iterable[tuple]):
    """Return a pivot node whose deletion leaves no cycle, or None.

    Edge directions are ignored. Parallel edges count as a cycle of length two.
    Candidates are tried in the given node order.
    """
    nodes = list(nodes)
    edges = [tuple(e) for e in edges]
    if not is_two_connected(nodes, edges):
        return None
    for v in nodes:
        rest = [u for u in nodes if u != v]
        kept = [(a, b) for a, b in edges if a != v and b != v]
        if is_forest(rest, kept):
            return v
    return None


# -- max flow -------------------------------------------------------------------

def max_flow(nodes: list, arcs: list, source, sink):
    """Shortest-augmenting-path maximum flow with exact capacities.

    ``arcs`` holds ``(u, v, capacity)`` with ``capacity=None`` for unbounded
    arcs. Returns the flow value, the flow per arc (aligned with ``arcs``)
    and the set of nodes reachable from the source in the final residual graph.
    """
    out = {v: [] for v in nodes}
    head, cap = [], []
    for u, v, c in arcs:
        out[u].append(len(head))
        head.append(v)
        cap.append(c)
        out[v].append(len(head))
        head.append(u)
        cap.append(ZERO)

    value = ZERO
    while True:
        pred = {source: None}
        queue = deque([source])
        while queue and sink not in pred:
            u = queue.popleft()
            for e in out[u]:
                v = head[e]
                if v not in pred and (cap[e] is None or cap[e] > 0):
                    pred[v] = e
                    queue.append(v)
        if sink not in pred:
            return value, [cap[2 * i + 1] for i in range(len(arcs))], set(pred)
        path = []
        v = sink
        while pred[v] is not None:
            e = pred[v]
            path.append(e)
            v = head[e ^ 1]
        finite = [cap[e] for e in path if cap[e] is not None]
        if not finite:
            raise ValueError("unbounded augmenting path")
        delta = min(finite)
        for e in path:
            if cap[e] is not None:
                cap[e] -= delta
            if cap[e ^ 1] is not None:
                cap[e ^ 1] += delta
        value += delta


# -- multiflow ---------------------------------------------------------------

@dataclass(frozen=True)
class MultiflowProblem:
    """Multicommodity flow with per-node net demands and shared arc capacities.

    Node-arc convention: inflow minus outflow of commodity k at v equals
    ``net_demand[k, v]``; the flows of all commodities plus a nonnegative
    slack fill each arc's capacity exactly.
    """

    nodes: tuple
    arcs: tuple
    commodities: tuple
    net_demand: dict
    capacity: dict

    def demand(self, k, v) -> Fraction:
        return self.net_demand.get((k, v), ZERO)

    def balanced(self, k) -> bool:
        return sum((self.demand(k, v) for v in self.nodes), ZERO) == 0

    def slack_demand(self, v) -> Fraction:
        inflow = sum((self.capacity[a] for a in self.arcs if a[1] == v), ZERO)
        outflow = sum((self.capacity[a] for a in self.arcs if a[0] == v), ZERO)
        return inflow - outflow - sum((self.demand(k, v) for k in self.commodities), ZERO)


def build_multiflow(inst: Instance, Q: InterimRule) -> MultiflowProblem:
    """Player-1 types are sources, player-2 types sinks, one commodity per non-slack alternative."""
    n1 = tuple((1, a) for a in inst.t1)
    n2 = tuple((2, b) for b in inst.t2)
    arcs = tuple((u, v) for u in n1 for v in n2)
    net = {}
    for k in inst.k_star:
        for a in inst.t1:
            net[(k, (1, a))] = -weighted(inst, Q, 1, k, a)
        for b in inst.t2:
            net[(k, (2, b))] = weighted(inst, Q, 2, k, b)
    capacity = {(u, v): inst.joint(u[1], v[1]) for u, v in arcs}
    return MultiflowProblem(n1 + n2, arcs, inst.k_star, net, capacity)


@dataclass(frozen=True)
class NetworkFlowProblem:
    """Uncapacitated arcs between rows; each row needs inflow - outflow = balance."""

    nodes: tuple
    arcs: tuple          # (tail, head, variable)
    balance: dict


def pivot_transform(mf: MultiflowProblem, pivot) -> NetworkFlowProblem:
    """Single-commodity network equivalent of ``mf`` for a suspension pivot.

    Rows are the conservation equations of every commodity (slack included)
    at every node other than the pivot, plus the capacity equations of the
    arcs touching the pivot. Capacity rows of arcs leaving the pivot are
    negated so every variable has one +1 and one -1 entry.
    """
    for k in mf.commodities:
        if not mf.balanced(k):
            raise UnbalancedProblem(f"commodity {k!r} does not balance")
    kinds = tuple(mf.commodities) + (SLACK,)
    rows = [("node", k, v) for k in kinds for v in mf.nodes if v != pivot]
    balance = {}
    for k in kinds:
        for v in mf.nodes:
            if v == pivot:
                continue
            balance[("node", k, v)] = mf.slack_demand(v) if k == SLACK else mf.demand(k, v)
    incident = [a for a in mf.arcs if pivot in a]
    for a in incident:
        rows.append(("cap", a))
        balance[("cap", a)] = -mf.capacity[a] if a[0] == pivot else mf.capacity[a]
    arcs = []
    for a in mf.arcs:
        u, w = a
        for k in kinds:
            var = (k, a)
            if u == pivot:
                arcs.append((("cap", a), ("node", k, w), var))
            elif w == pivot:
                arcs.append((("node", k, u), ("cap", a), var))
            else:
                arcs.append((("node", k, u), ("node", k, w), var))
    return NetworkFlowProblem(tuple(rows), tuple(arcs), balance)


def solve_network(net: NetworkFlowProblem):
    """Feasible flow as {variable: value}, or None when no flow meets every balance."""
    if sum(net.balance.values(), ZERO) != 0:
        return None
    src, snk = ("<source>",), ("<sink>",)
    arcs = [(t, h, None) for t, h, _ in net.arcs]
    need = ZERO
    for v in net.nodes:
        b = net.balance[v]
        if b < 0:
            arcs.append((src, v, -b))
        elif b > 0:
            arcs.append((v, snk, b))
            need += b
    value, flows, _ = max_flow(list(net.nodes) + [src, snk], arcs, src, snk)
    if value != need:
        return None
    return {var: flows[i] for i, (_, _, var) in enumerate(net.arcs)}


def solve_multiflow(mf: MultiflowProblem, pivot=None):
    """Commodity flows ``{(k, arc): value}`` (slack under SLACK), or None if infeasible."""
    if pivot is None:
        pivot = is_suspension(mf.nodes, mf.arcs)
        if pivot is None:
            raise ValueError("graph is not a suspension")
    if not all(mf.balanced(k) for k in mf.commodities):
        return None
    return solve_network(pivot_transform(mf, pivot))


# -- transportation problem -----------------------------------------------------

@dataclass(frozen=True)
class TransportationProblem:
    """Bipartite supply/demand problem with uncapacitated arcs.

    Supply nodes are ``("S", k, t2)``; demand nodes are ``("D", k, t1)`` for
    the non-pivot types of player 1 and ``("P", pivot, t2)``.
    """

    pivot: str
    supply: dict
    demand: dict
    arcs: tuple

    def neighbours(self, demand_nodes) -> set:
        targets = set(demand_nodes)
        return {s for s, d in self.arcs if d in targets}


@dataclass(frozen=True)
class HallWitness:
    u: frozenset
    demand: Fraction
    supply: Fraction

    @property
    def gap(self) -> Fraction:
        return self.demand - self.supply


@dataclass(frozen=True)
class TransportFlow:
    problem: TransportationProblem
    flow: dict = field(repr=False)


def transform(inst: Instance, Q: InterimRule) -> TransportationProblem:
    """Transportation problem obtained by pivoting on the first type of player 1."""
    if len(inst.t1) != 2:
        raise AssumptionViolated(f"player 1 must have exactly two types, got {len(inst.t1)}")
    full = complete_with_slack(inst, Q)
    pivot = inst.t1[0]
    others = inst.t1[1:]
    supply = {("S", k, b): weighted(inst, full, 2, k, b)
              for k in inst.alternatives for b in inst.t2}
    demand = {}
    for a in others:
        for k in inst.alternatives:
            demand[("D", k, a)] = weighted(inst, full, 1, k, a)
    for b in inst.t2:
        demand[("P", pivot, b)] = inst.joint(pivot, b)
    arcs = []
    for k in inst.alternatives:
        for b in inst.t2:
            s = ("S", k, b)
            for a in others:
                arcs.append((s, ("D", k, a)))
            arcs.append((s, ("P", pivot, b)))
    return TransportationProblem(pivot, supply, demand, tuple(arcs))


def solve_transportation(p: TransportationProblem):
    """Exact feasible flow or a demand set whose demand exceeds its neighbours' supply."""
    total_s = sum(p.supply.values(), ZERO)
    total_d = sum(p.demand.values(), ZERO)
    if total_s != total_d:
        raise UnbalancedProblem(f"supply {total_s} != demand {total_d}")
    if any(v < 0 for v in p.supply.values()) or any(v < 0 for v in p.demand.values()):
        raise NegativeData("transportation data must be nonnegative")
    src, snk = ("<source>",), ("<sink>",)
    arcs = [(src, s, c) for s, c in p.supply.items()]
    arcs += [(s, d, None) for s, d in p.arcs]
    arcs += [(d, snk, c) for d, c in p.demand.items()]
    nodes = [src, snk] + list(p.supply) + list(p.demand)
    value, flows, reach = max_flow(nodes, arcs, src, snk)
    if value == total_d:
        offset = len(p.supply)
        return TransportFlow(p, {a: flows[offset + i] for i, a in enumerate(p.arcs)})
    # demand nodes cut off from the source; their neighbours are all cut off too
    u = frozenset(d for d in p.demand if d not in reach)
    witness = HallWitness(u, sum((p.demand[d] for d in u), ZERO),
                          sum((p.supply[s] for s in p.neighbours(u)), ZERO))
    assert witness.demand > witness.supply
    return witness


def extract_ex_post(inst: Instance, result: TransportFlow) -> ExPostRule:
    """Ex post rule from a feasible transportation flow: q = flow / lambda(t)."""
    pivot = result.problem.pivot
    q = {}
    for (s, d), x in result.flow.items():
        _, k, b = s
        a = pivot if d[0] == "P" else d[2]
        q[(k, a, b)] = q.get((k, a, b), ZERO) + x / inst.joint(a, b)
    for k in inst.alternatives:
        for a, b in inst.profiles():
            q.setdefault((k, a, b), ZERO)
    return ExPostRule(q)


def hall_witness_to_violation(inst: Instance, Q: InterimRule, witness: HallWitness):
    """Map a Hall-condition failure on the pivoted problem to a violated inequality.

    Player 1 must have two types, the first being the pivot. Demand sets split
    into alternatives at the non-pivot type (U1) and pivot profiles (U2).
    """
    pivot, other = inst.t1
    u1 = {d[1] for d in witness.u if d[0] == "D"}
    u2 = {d[2] for d in witness.u if d[0] == "P"}
    if inst.k0 not in u1:
        triple = CutTriple(tuple(k for k in inst.k_star if k in u1), (other,),
                           tuple(b for b in inst.t2 if b not in u2))
    else:
        triple = CutTriple(tuple(k for k in inst.k_star if k not in u1), (pivot,),
                           tuple(b for b in inst.t2 if b in u2))
    from .characterization import check_conic, eval_cut

    ev = eval_cut(inst, Q, triple)
    if ev.violated:
        return ev.as_violation()
    conic = check_conic(inst, Q)
    if conic:
        return conic[0]
    raise AssertionError(f"Hall witness {witness} did not map to a violated inequality")


def _swap_violation(inst: Instance, v):
    """Translate a violation found on the player-swapped instance back to ``inst``."""
    if isinstance(v, Negative):
        return Negative(3 - v.player, v.k, v.t)
    if isinstance(v, Cut):
        t = v.triple
        triple = CutTriple(t.g, tuple(a for a in inst.t1 if a not in t.e2),
                           tuple(b for b in inst.t2 if b not in t.e1))
        return Cut(triple, v.lhs, v.rhs)
    return v


def implement(inst: Instance, Q: InterimRule):
    """Implementable(witness) or NotImplementable(certificate) via the transportation route.

    Uses the first binary type space; swaps player roles when only player 2
    has two types. The inequality checks are not consulted: infeasibility is
    read off the Hall witness.
    """
    if len(inst.t1) != 2:
        if len(inst.t2) != 2:
            raise AssumptionViolated("neither player has exactly two types")
        from .characterization import eval_cut

        outcome = implement(inst.swapped(), Q.swapped())
        if isinstance(outcome, Implementable):
            return Implementable(outcome.witness.swapped())
        v = _swap_violation(inst, outcome.certificate)
        if isinstance(v, Cut):
            v = eval_cut(inst, Q, v.triple).as_violation()
        return NotImplementable(v)

    from .characterization import check_conic, eval_cut

    conic = check_conic(inst, Q)
    if conic:
        return NotImplementable(conic[0])
    full = complete_with_slack(inst, Q)
    for player in (1, 2):
        for t in inst.types(player):
            if full.get(player, inst.k0, t) < 0:
                return NotImplementable(Negative(player, inst.k0, t))
    result = solve_transportation(transform(inst, Q))
    if isinstance(result, TransportFlow):
        return Implementable(extract_ex_post(inst, result))
    v = hall_witness_to_violation(inst, Q, result)
    if isinstance(v, Cut):
        # re-evaluate so lhs/rhs are always the plain inequality values
        v = eval_cut(inst, Q, v.triple).as_violation()
    return NotImplementable(v)


def format_network(p: TransportationProblem) -> str:
    """Adjacency listing: one line per node with its supply or demand and out-arcs."""
    def name(node):
        return "(" + ",".join(str(x) for x in node[1:]) + ")"

    lines = [f"# pivot {p.pivot}"]
    for s, c in p.supply.items():
        targets = " ".join(name(d) for t, d in p.arcs if t == s)
        lines.append(f"supply {name(s)} {c} -> {targets}")
    for d, c in p.demand.items():
        lines.append(f"demand {name(d)} {c}")
    return "\n".join(lines)
