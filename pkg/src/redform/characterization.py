"""Inequality characterization of implementable interim rules.

The checks here read only the non-slack alternatives of an interim rule.
Cut inequalities are indexed by triples (G, E1, E2) and enumerated in a fixed
lexicographic order, so the first reported violation is deterministic.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .core import (
    ZERO,
    AssumptionViolated,
    Conic,
    Cut,
    CutTriple,
    Implementable,
    InequalitiesHold,
    Instance,
    InterimRule,
    Negative,
    NotImplementable,
    Verdict,
    weighted,
)


class WrongAlternativeCount(ValueError):
    pass


class CharacterizationError(RuntimeError):
    """The inequalities hold but the constructive route failed; indicates a bug."""


def subsets(items: Sequence) -> list[tuple]:
    """All subsets of ``items`` as tuples, ordered lexicographically by position.

    For (a, b): (), (a,), (a, b), (b,).
    """
    items = tuple(items)
    out: list[tuple] = []

    def walk(start, prefix):
        out.append(prefix)
        for i in range(start, len(items)):
            walk(i + 1, prefix + (items[i],))

    walk(0, ())
    return out


def _mass_table(values: dict, sets: list[tuple]) -> dict:
    return {s: sum((values[t] for t in s), ZERO) for s in sets}


class CutEvaluation:
    __slots__ = ("triple", "lhs", "rhs")

    def __init__(self, triple: CutTriple, lhs: Fraction, rhs: Fraction):
        self.triple = triple
        self.lhs = lhs
        self.rhs = rhs

    @property
    def violated(self) -> bool:
        return self.lhs > self.rhs

    def as_violation(self) -> Cut:
        return Cut(self.triple, self.lhs, self.rhs)

    def __repr__(self):
        return f"CutEvaluation({self.triple}, lhs={self.lhs}, rhs={self.rhs})"


def ex_ante(inst: Instance, Q: InterimRule, player: int, k: str) -> Fraction:
    return sum((weighted(inst, Q, player, k, t) for t in inst.types(player)), ZERO)


def check_conic(inst: Instance, Q: InterimRule) -> list:
    """Belief-consistency and nonnegativity failures on the non-slack alternatives.

    Conic violations come first (in alternative order), then Negative ones
    ordered by player, alternative, type.
    """
    out: list = []
    for k in inst.k_star:
        if ex_ante(inst, Q, 1, k) != ex_ante(inst, Q, 2, k):
            out.append(Conic(k))
    for player in (1, 2):
        for k in inst.k_star:
            for t in inst.types(player):
                if Q.get(player, k, t) < 0:
                    out.append(Negative(player, k, t))
    return out


def eval_cut(inst: Instance, Q: InterimRule, triple: CutTriple) -> CutEvaluation:
    lhs = ZERO
    for k in triple.g:
        lhs += sum((weighted(inst, Q, 1, k, a) for a in triple.e1), ZERO)
        lhs -= sum((weighted(inst, Q, 2, k, b) for b in triple.e2), ZERO)
    e2c = [b for b in inst.t2 if b not in triple.e2]
    return CutEvaluation(triple, lhs, inst.mass(triple.e1, e2c))


def iter_cuts(inst: Instance, Q: InterimRule, prune: bool = False):
    """Yield a CutEvaluation for every triple in lexicographic (G, E1, E2) order.

    ``prune`` skips G = {} and E1 = {}, which is sound only once the
    nonnegativity half of the conic condition is known to hold.
    """
    g_sets = subsets(inst.k_star)
    e1_sets = subsets(inst.t1)
    e2_sets = subsets(inst.t2)
    lam1 = _mass_table(inst.lambda1, e1_sets)
    lam2 = _mass_table(inst.lambda2, e2_sets)
    total2 = sum(inst.lambda2.values(), ZERO)
    h1 = {k: {a: weighted(inst, Q, 1, k, a) for a in inst.t1} for k in inst.k_star}
    h2 = {k: {b: weighted(inst, Q, 2, k, b) for b in inst.t2} for k in inst.k_star}
    for g in g_sets:
        if prune and not g:
            continue
        w1 = {a: sum((h1[k][a] for k in g), ZERO) for a in inst.t1}
        w2 = {b: sum((h2[k][b] for k in g), ZERO) for b in inst.t2}
        s1 = _mass_table(w1, e1_sets)
        s2 = _mass_table(w2, e2_sets)
        for e1 in e1_sets:
            if prune and not e1:
                continue
            for e2 in e2_sets:
                rhs = lam1[e1] * (total2 - lam2[e2])
                yield CutEvaluation(CutTriple(g, e1, e2), s1[e1] - s2[e2], rhs)


def check_cuts(inst: Instance, Q: InterimRule, mode: str = "first", prune: bool = False) -> list:
    """Violated cut inequalities: at most one in ``first`` mode, every one in ``all`` mode."""
    if mode not in ("first", "all"):
        raise ValueError(f"unknown mode {mode!r}")
    found = []
    for ev in iter_cuts(inst, Q, prune=prune):
        if ev.violated:
            found.append(ev)
            if mode == "first":
                break
    return found


def count_cuts(inst: Instance) -> int:
    return 2 ** (len(inst.k_star) + len(inst.t1) + len(inst.t2))


def check_necessary(inst: Instance, Q: InterimRule):
    """First violation of the conic condition or a cut inequality, else None."""
    conic = check_conic(inst, Q)
    if conic:
        return conic[0]
    cuts = check_cuts(inst, Q, mode="first", prune=True)
    if cuts:
        return cuts[0].as_violation()
    return None


def check_implementable(inst: Instance, Q: InterimRule, mode: str = "full") -> Verdict:
    """Decide implementability of Q.

    In ``full`` mode one player must have exactly two types and an
    implementing ex post rule is returned on success. ``necessary-only``
    works for any type spaces but never claims implementability.
    """
    if mode not in ("full", "necessary-only"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "full" and not inst.satisfies_assumption:
        raise AssumptionViolated(
            f"need min(|T1|, |T2|) = 2, got {len(inst.t1)} x {len(inst.t2)}")
    violation = check_necessary(inst, Q)
    if violation is not None:
        return NotImplementable(violation)
    if mode == "necessary-only":
        return InequalitiesHold()

    from .flow import implement

    outcome = implement(inst, Q)
    if not isinstance(outcome, Implementable):
        raise CharacterizationError(
            f"all inequalities hold but the transportation problem is infeasible: {outcome}")
    return outcome


def check_strassen(inst: Instance, Q: InterimRule) -> bool:
    """Two-alternative case: nu_1(E1) <= nu_2(E2) + lambda(E1 x E2^c) plus the conic condition."""
    if len(inst.alternatives) != 2:
        raise WrongAlternativeCount(f"need exactly 2 alternatives, got {len(inst.alternatives)}")
    if check_conic(inst, Q):
        return False
    (k1,) = inst.k_star
    e1_sets = subsets(inst.t1)
    e2_sets = subsets(inst.t2)
    nu1 = _mass_table({a: weighted(inst, Q, 1, k1, a) for a in inst.t1}, e1_sets)
    nu2 = _mass_table({b: weighted(inst, Q, 2, k1, b) for b in inst.t2}, e2_sets)
    for e1 in e1_sets:
        for e2 in e2_sets:
            coupling = inst.mass(e1, [b for b in inst.t2 if b not in e2])
            if nu1[e1] > nu2[e2] + coupling:
                return False
    return True


def symmetric_lhs(inst: Instance, Q: InterimRule, triple: CutTriple) -> Fraction:
    total = ZERO
    for player, e in ((1, triple.e1), (2, triple.e2)):
        for k in triple.g:
            for t in inst.types(player):
                w = weighted(inst, Q, player, k, t)
                total += w if t in e else -w
    return total / 2


def check_symmetric(inst: Instance, Q: InterimRule) -> bool:
    """Player-symmetric form: half-weighted in/out differences bounded by lambda(E1 x E2)."""
    g_sets = subsets(inst.k_star)
    e1_sets = subsets(inst.t1)
    e2_sets = subsets(inst.t2)
    h = {(p, k): {t: weighted(inst, Q, p, k, t) for t in inst.types(p)}
         for p in (1, 2) for k in inst.k_star}
    for g in g_sets:
        w1 = {a: sum((h[1, k][a] for k in g), ZERO) for a in inst.t1}
        w2 = {b: sum((h[2, k][b] for k in g), ZERO) for b in inst.t2}
        tot1 = sum(w1.values(), ZERO)
        tot2 = sum(w2.values(), ZERO)
        s1 = _mass_table(w1, e1_sets)
        s2 = _mass_table(w2, e2_sets)
        for e1 in e1_sets:
            for e2 in e2_sets:
                lhs = (2 * s1[e1] - tot1 + 2 * s2[e2] - tot2) / 2
                if lhs > inst.mass(e1, e2):
                    return False
    return True


def certificate_valid(inst: Instance, Q: InterimRule, violation) -> bool:
    """Re-evaluate a certificate from scratch; True iff it is strictly violated."""
    from .core import complete_with_slack

    if isinstance(violation, Cut):
        ev = eval_cut(inst, Q, violation.triple)
        return ev.violated and (ev.lhs, ev.rhs) == (violation.lhs, violation.rhs)
    if isinstance(violation, Conic):
        return ex_ante(inst, Q, 1, violation.k) != ex_ante(inst, Q, 2, violation.k)
    if isinstance(violation, Negative):
        full = complete_with_slack(inst, Q)
        return full.get(violation.player, violation.k, violation.t) < 0
    return False
