"""Row-lattice structure of the cut system.

Rows are triples (E1, E2, G) ordered componentwise by inclusion. Internally
a row is one bitmask: bits 0..|T1|-1 for E1, then |T2| bits for E2, then
|K*| bits for G, so meet and join are ``&`` and ``|``.

The checks are exhaustive when the number of tuples to test fits the
budget; otherwise they sample uniformly with a recorded seed, or raise.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from .core import ZERO, Instance, InterimRule, weighted

DEFAULT_BUDGET = 2 ** 22


class EnumerationBudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class LatticeElement:
    e1: frozenset
    e2: frozenset
    g: frozenset

    def __le__(self, other: "LatticeElement") -> bool:
        return self.e1 <= other.e1 and self.e2 <= other.e2 and self.g <= other.g


def meet_join(a: LatticeElement, b: LatticeElement) -> tuple[LatticeElement, LatticeElement]:
    meet = LatticeElement(a.e1 & b.e1, a.e2 & b.e2, a.g & b.g)
    join = LatticeElement(a.e1 | b.e1, a.e2 | b.e2, a.g | b.g)
    return meet, join


class RowLattice:
    """Bitmask encoding of the row lattice of one instance."""

    def __init__(self, inst: Instance):
        self.inst = inst
        self.n1, self.n2, self.ng = len(inst.t1), len(inst.t2), len(inst.k_star)
        self.bits = self.n1 + self.n2 + self.ng
        self.size = 1 << self.bits

    def encode(self, el: LatticeElement) -> int:
        inst = self.inst
        m = 0
        for i, t in enumerate(inst.t1):
            if t in el.e1:
                m |= 1 << i
        for i, t in enumerate(inst.t2):
            if t in el.e2:
                m |= 1 << (self.n1 + i)
        for i, k in enumerate(inst.k_star):
            if k in el.g:
                m |= 1 << (self.n1 + self.n2 + i)
        return m

    def decode(self, m: int) -> LatticeElement:
        inst = self.inst
        e1 = frozenset(t for i, t in enumerate(inst.t1) if m >> i & 1)
        e2 = frozenset(t for i, t in enumerate(inst.t2) if m >> (self.n1 + i) & 1)
        g = frozenset(k for i, k in enumerate(inst.k_star) if m >> (self.n1 + self.n2 + i) & 1)
        return LatticeElement(e1, e2, g)

    def columns(self) -> list[tuple]:
        """Column labels (player, type, alternative) in declared order."""
        inst = self.inst
        return [(1, t, k) for t in inst.t1 for k in inst.k_star] + \
               [(2, t, k) for t in inst.t2 for k in inst.k_star]

    def coeff_table(self, column: tuple) -> list[int]:
        """h_j over all rows: +1 on E1 x G for player-1 columns, -1 on E2 x G for player-2 columns."""
        player, t, k = column
        if player == 1:
            tbit = 1 << self.inst.t1.index(t)
            sign = 1
        else:
            tbit = 1 << (self.n1 + self.inst.t2.index(t))
            sign = -1
        gbit = 1 << (self.n1 + self.n2 + self.inst.k_star.index(k))
        want = tbit | gbit
        return [sign if m & want == want else 0 for m in range(self.size)]

    def beta_table(self, beta: Optional[Callable] = None) -> list[Fraction]:
        """Right-hand sides per row; default lambda(E1 x E2^c)."""
        inst = self.inst
        out = []
        for m in range(self.size):
            el = self.decode(m)
            if beta is None:
                out.append(inst.mass(el.e1, [b for b in inst.t2 if b not in el.e2]))
            else:
                out.append(beta(inst, el))
        return out


def corrupted_beta(inst: Instance, el: LatticeElement) -> Fraction:
    """lambda(E1 x E2): the right-hand side with E2 left uncomplemented (negative control)."""
    return inst.mass(el.e1, el.e2)


@dataclass
class CheckResult:
    name: str
    checked: int
    failures: int
    exhaustive: bool
    example: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def line(self) -> str:
        scope = "exhaustive" if self.exhaustive else "sampled"
        status = "PASS" if self.passed else "FAIL"
        text = f"{status}\t{self.name}\t{scope}\tchecked={self.checked}\tfailures={self.failures}"
        if self.example:
            text += f"\tfirst={self.example}"
        return text


@dataclass
class LatticeReport:
    checks: list = field(default_factory=list)
    seed: Optional[int] = None

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def get(self, name: str) -> CheckResult:
        return next(c for c in self.checks if c.name == name)

    def lines(self) -> list[str]:
        return [c.line() for c in self.checks]


class _Plan:
    """Decides exhaustive vs sampled enumeration of k-tuples of rows."""

    def __init__(self, size: int, budget: int, samples: int, seed: int):
        self.size, self.budget, self.samples = size, budget, samples
        self.rng = random.Random(seed)

    def tuples(self, arity: int):
        total = self.size ** arity
        if total <= self.budget:
            return True, _all_tuples(self.size, arity)
        if not self.samples:
            raise EnumerationBudgetExceeded(
                f"{total} {arity}-tuples exceed budget {self.budget}; enable sampling")
        rng = self.rng
        return False, ([rng.randrange(self.size) for _ in range(arity)] for _ in range(self.samples))


def _all_tuples(size, arity):
    if arity == 2:
        return ((a, b) for a in range(size) for b in range(size))
    return ((a, b, c) for a in range(size) for b in range(size) for c in range(size))


def _fmt(lat: RowLattice, *ms) -> str:
    parts = []
    for m in ms:
        el = lat.decode(m)
        parts.append("(" + "|".join(",".join(sorted(s)) or "-" for s in (el.e1, el.e2, el.g)) + ")")
    return " ".join(parts)


def check_lattice_axioms(lat: RowLattice, plan: _Plan) -> list[CheckResult]:
    exhaustive, triples = plan.tuples(3)
    checked = fails = 0
    example = None
    for a, b, c in triples:
        checked += 1
        ok = (a & (b | c)) == ((a & b) | (a & c)) and (a | (b & c)) == ((a | b) & (a | c)) \
            and (a & (b & c)) == ((a & b) & c) and (a | (b | c)) == ((a | b) | c) \
            and (a & (a | b)) == a and (a | (a & b)) == a
        if not ok:
            fails += 1
            example = example or _fmt(lat, a, b, c)
    return [CheckResult("lattice-distributive", checked, fails, exhaustive, example)]


def check_beta_submodular(inst: Instance, budget: int = DEFAULT_BUDGET, samples: int = 0,
                          seed: int = 0, beta: Optional[Callable] = None) -> CheckResult:
    lat = RowLattice(inst)
    return _beta_submodular(lat, lat.beta_table(beta), _Plan(lat.size, budget, samples, seed))


def _beta_submodular(lat: RowLattice, table: list, plan: _Plan) -> CheckResult:
    exhaustive, pairs = plan.tuples(2)
    checked = fails = 0
    example = None
    for a, b in pairs:
        checked += 1
        if table[a] + table[b] < table[a | b] + table[a & b]:
            fails += 1
            example = example or _fmt(lat, a, b)
    return CheckResult("beta-submodular", checked, fails, exhaustive, example)


def _comparable_pairs(size):
    for b in range(1, size):
        a = (b - 1) & b
        # proper submasks of b, descending
        while True:
            yield a, b
            if a == 0:
                break
            a = (a - 1) & b


def _chains(size):
    for b in range(size):
        lows = []
        a = (b - 1) & b
        while b:
            lows.append(a)
            if a == 0:
                break
            a = (a - 1) & b
        if not lows:
            continue
        full = size - 1
        rest = full & ~b
        c = rest
        while c:
            for low in lows:
                yield low, b, b | c
            c = (c - 1) & rest


def check_coeff_conditions(inst: Instance, which: str = "all", budget: int = DEFAULT_BUDGET,
                           samples: int = 0, seed: int = 0) -> list[CheckResult]:
    """C1 on comparable pairs, C2 on 3-chains, C3 and modularity on all pairs, per column."""
    lat = RowLattice(inst)
    plan = _Plan(lat.size, budget, samples, seed)
    wanted = {"C1", "C2", "C3", "modular"} if which == "all" else {which}
    tables = [(col, lat.coeff_table(col)) for col in lat.columns()]
    results = []
    if "C1" in wanted:
        results.append(_run_c1(lat, tables, plan))
    if "C2" in wanted:
        results.append(_run_c2(lat, tables, plan))
    if wanted & {"C3", "modular"}:
        exhaustive, pairs = plan.tuples(2)
        pairs = list(pairs)
        if "C3" in wanted:
            results.append(_run_pairs(lat, tables, pairs, exhaustive, "coeff-C3",
                                      lambda h, a, b: h[a] + h[b] <= h[a | b] + h[a & b]))
        if "modular" in wanted:
            results.append(_run_pairs(lat, tables, pairs, exhaustive, "coeff-modular",
                                      lambda h, a, b: h[a] + h[b] == h[a | b] + h[a & b]))
    return results


def _label(col):
    player, t, k = col
    return f"j=({player},{t},{k})"


def _run_pairs(lat, tables, pairs, exhaustive, name, ok):
    checked = fails = 0
    example = None
    for col, h in tables:
        for a, b in pairs:
            checked += 1
            if not ok(h, a, b):
                fails += 1
                example = example or f"{_label(col)} {_fmt(lat, a, b)}"
    return CheckResult(name, checked, fails, exhaustive, example)


def _run_c1(lat, tables, plan):
    exhaustive = 3 ** lat.bits <= plan.budget
    if exhaustive:
        pairs = list(_comparable_pairs(lat.size))
    else:
        if not plan.samples:
            raise EnumerationBudgetExceeded("comparable pairs exceed budget; enable sampling")
        pairs = []
        for _ in range(plan.samples):
            b = plan.rng.randrange(1, lat.size)
            a = plan.rng.randrange(lat.size) & b
            if a == b:
                a = 0
            pairs.append((a, b))
    checked = fails = 0
    example = None
    for col, h in tables:
        for a, b in pairs:
            checked += 1
            if abs(h[a] - h[b]) > 1:
                fails += 1
                example = example or f"{_label(col)} {_fmt(lat, a, b)}"
    return CheckResult("coeff-C1", checked, fails, exhaustive, example)


def _run_c2(lat, tables, plan):
    exhaustive = 4 ** lat.bits <= plan.budget
    if exhaustive:
        chains = list(_chains(lat.size))
    else:
        if not plan.samples:
            raise EnumerationBudgetExceeded("3-chains exceed budget; enable sampling")
        chains = []
        rng = plan.rng
        while len(chains) < plan.samples:
            c = rng.randrange(lat.size)
            b = rng.randrange(lat.size) & c
            a = rng.randrange(lat.size) & b
            if a != b and b != c:
                chains.append((a, b, c))
    checked = fails = 0
    example = None
    for col, h in tables:
        for a, b, c in chains:
            checked += 1
            if abs(h[a] - h[b] + h[c]) > 1:
                fails += 1
                example = example or f"{_label(col)} {_fmt(lat, a, b, c)}"
    return CheckResult("coeff-C2", checked, fails, exhaustive, example)


def verify_lattice_polyhedron(inst: Instance, budget: int = DEFAULT_BUDGET, samples: int = 0,
                              seed: int = 0, beta: Optional[Callable] = None) -> LatticeReport:
    """Lattice axioms, submodular right-hand side, and C1/C2/C3/modularity of every column."""
    lat = RowLattice(inst)
    plan = _Plan(lat.size, budget, samples, seed)
    report = LatticeReport(seed=seed if samples else None)
    report.checks += check_lattice_axioms(lat, plan)
    report.checks.append(_beta_submodular(lat, lat.beta_table(beta), plan))
    report.checks += check_coeff_conditions(inst, "all", budget, samples, seed)
    return report


# -- the row system as a description of the (E5, E6) set ------------------------

def row_values(inst: Instance, Q: InterimRule, el: LatticeElement) -> tuple[Fraction, Fraction]:
    """(h(A) . a, beta(A)) at the point a = Q * lambda for row A."""
    lhs = ZERO
    for k in el.g:
        lhs += sum((weighted(inst, Q, 1, k, t) for t in el.e1), ZERO)
        lhs -= sum((weighted(inst, Q, 2, k, t) for t in el.e2), ZERO)
    return lhs, inst.mass(el.e1, [b for b in inst.t2 if b not in el.e2])


def in_row_polyhedron(inst: Instance, Q: InterimRule, beta: Optional[Callable] = None) -> bool:
    """Membership of Q in {a >= 0 : h(A) . a <= beta(A) for all rows}, evaluated row by row."""
    lat = RowLattice(inst)
    if any(Q.get(p, k, t) < 0 for p in (1, 2) for k in inst.k_star for t in inst.types(p)):
        return False
    betas = lat.beta_table(beta)
    for m in range(lat.size):
        lhs, _ = row_values(inst, Q, lat.decode(m))
        if lhs > betas[m]:
            return False
    return True


def compare_with_characterization(inst: Instance, rules: list, beta: Optional[Callable] = None) -> int:
    """Number of rules where row-polyhedron membership disagrees with Eq-5-and-cuts."""
    from .characterization import check_cuts

    mismatches = 0
    for Q in rules:
        nonneg = all(Q.get(p, k, t) >= 0 for p in (1, 2) for k in inst.k_star
                     for t in inst.types(p))
        expected = nonneg and not check_cuts(inst, Q, mode="first")
        if in_row_polyhedron(inst, Q, beta) != expected:
            mismatches += 1
    return mismatches
