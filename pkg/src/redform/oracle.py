"""Ground truth by direct feasibility of the defining linear system.

No inequality characterization and no flow machinery: the unknowns are the
ex post probabilities q(k, t1, t2) >= 0, constrained by the reduced-form
equations on the non-slack alternatives and by one lottery equation per
profile. Feasibility is decided by a phase-one simplex over exact rationals
with Bland's rule.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .core import (
    ZERO,
    ExPostRule,
    Implementable,
    InequalitiesHold,
    Instance,
    InterimRule,
    NotImplementable,
    reduce,
)


@dataclass
class RawSystem:
    """Dense equality system ``A x = b, x >= 0`` with named variables."""

    variables: list
    rows: list = field(default_factory=list)      # list of {var index: coefficient}
    rhs: list = field(default_factory=list)
    labels: list = field(default_factory=list)

    def add(self, coeffs: dict, b: Fraction, label=None) -> None:
        self.rows.append(coeffs)
        self.rhs.append(Fraction(b))
        self.labels.append(label)


def raw_system(inst: Instance, Q: InterimRule) -> RawSystem:
    index = {}
    variables = []
    for k in inst.alternatives:
        for a, b in inst.profiles():
            index[(k, a, b)] = len(variables)
            variables.append((k, a, b))
    system = RawSystem(variables)
    for k in inst.k_star:
        for a in inst.t1:
            system.add({index[(k, a, b)]: inst.lambda2[b] for b in inst.t2},
                       Q.get(1, k, a), ("interim", 1, k, a))
    for k in inst.k_star:
        for b in inst.t2:
            system.add({index[(k, a, b)]: inst.lambda1[a] for a in inst.t1},
                       Q.get(2, k, b), ("interim", 2, k, b))
    for a, b in inst.profiles():
        system.add({index[(k, a, b)]: Fraction(1) for k in inst.alternatives},
                   Fraction(1), ("lottery", a, b))
    return system


def simplex_feasible(rows: list, rhs: list, n: int) -> Optional[list]:
    """A basic solution of ``A x = b, x >= 0`` or None, by phase one with Bland's rule.

    ``rows`` are sparse dicts over column indices ``0..n-1``. One artificial
    column per row starts in the basis; the phase-one objective is their sum.
    """
    m = len(rows)
    width = n + m
    tab = []
    for i, (row, b) in enumerate(zip(rows, rhs)):
        sign = -1 if b < 0 else 1
        line = [ZERO] * (width + 1)
        for j, c in row.items():
            line[j] = sign * c
        line[n + i] = Fraction(1)
        line[width] = sign * b
        tab.append(line)
    basis = [n + i for i in range(m)]
    # reduced costs of the phase-one objective (minimise the artificial sum)
    cost = [ZERO] * (width + 1)
    for line in tab:
        for j in range(n):
            if line[j]:
                cost[j] -= line[j]
        cost[width] -= line[width]

    while True:
        entering = next((j for j in range(width) if cost[j] < 0), None)
        if entering is None:
            break
        leaving, best = None, None
        for i, line in enumerate(tab):
            a = line[entering]
            if a > 0:
                ratio = line[width] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leaving]):
                    leaving, best = i, ratio
        if leaving is None:
            # cannot happen in phase one: the objective is bounded below by zero
            raise ArithmeticError("phase-one problem reported unbounded")
        _pivot(tab, cost, leaving, entering, width)
        basis[leaving] = entering

    if cost[width] != 0:
        return None
    x = [ZERO] * n
    for i, j in enumerate(basis):
        if j < n:
            x[j] = tab[i][width]
    return x


def _pivot(tab, cost, r, c, width):
    prow = tab[r]
    p = prow[c]
    if p != 1:
        for j in range(width + 1):
            if prow[j]:
                prow[j] /= p
    nz = [j for j in range(width + 1) if prow[j]]
    for i, line in enumerate(tab):
        f = line[c]
        if i != r and f:
            for j in nz:
                line[j] -= f * prow[j]
    f = cost[c]
    if f:
        for j in nz:
            cost[j] -= f * prow[j]


def lp_feasible(inst: Instance, Q: InterimRule) -> Optional[ExPostRule]:
    """Some feasible ex post rule reproducing Q on the non-slack alternatives, or None."""
    system = raw_system(inst, Q)
    x = simplex_feasible(system.rows, system.rhs, len(system.variables))
    if x is None:
        return None
    return ExPostRule(dict(zip(system.variables, x)))


def verdict_kind(verdict) -> str:
    if isinstance(verdict, Implementable):
        return "implementable"
    if isinstance(verdict, InequalitiesHold):
        return "inequalities-hold"
    return "not-implementable"


@dataclass
class CrossCheck:
    mode: str
    characterization: object
    oracle: Optional[ExPostRule]
    agree: bool
    detail: str = ""

    @property
    def gap(self) -> bool:
        """Necessary-only mode: inequalities hold yet no ex post rule exists."""
        return isinstance(self.characterization, InequalitiesHold) and self.oracle is None


def cross_check(inst: Instance, Q: InterimRule, mode: Optional[str] = None) -> CrossCheck:
    """Run the characterization and the raw LP side by side.

    In full mode the verdicts must coincide and both witnesses must
    reproduce Q. In necessary-only mode only one direction is guaranteed:
    an LP-feasible rule must pass every inequality.
    """
    from .characterization import certificate_valid, check_implementable
    from .flow import implement

    if mode is None:
        mode = "full" if inst.satisfies_assumption else "necessary-only"
    verdict = check_implementable(inst, Q, mode=mode)
    q_lp = lp_feasible(inst, Q)
    problems = []
    for name, q in (("oracle", q_lp),
                    ("flow", verdict.witness if isinstance(verdict, Implementable) else None)):
        if q is None:
            continue
        red = reduce(inst, q)
        for player in (1, 2):
            for k in inst.k_star:
                for t in inst.types(player):
                    if red.get(player, k, t) != Q.get(player, k, t):
                        problems.append(f"{name} witness misses Q{player}[{k},{t}]")
    if isinstance(verdict, NotImplementable) and not certificate_valid(inst, Q, verdict.certificate):
        problems.append(f"invalid certificate {verdict.certificate}")
    if mode == "full":
        agree = isinstance(verdict, Implementable) == (q_lp is not None)
        # the transportation route on its own, including Hall-witness mapping
        routed = implement(inst, Q)
        if isinstance(routed, Implementable) != (q_lp is not None):
            problems.append("transportation route disagrees with the oracle")
        elif isinstance(routed, NotImplementable) and \
                not certificate_valid(inst, Q, routed.certificate):
            problems.append(f"invalid Hall-mapped certificate {routed.certificate}")
    else:
        agree = not (isinstance(verdict, NotImplementable) and q_lp is not None)
    if problems:
        agree = False
    detail = "; ".join(problems)
    if not agree and not detail:
        detail = f"characterization says {verdict_kind(verdict)}, oracle says " + \
            ("feasible" if q_lp is not None else "infeasible")
    return CrossCheck(mode, verdict, q_lp, agree, detail)
