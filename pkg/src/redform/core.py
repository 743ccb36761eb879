"""Exact-rational model of a two-player implementation problem.

Probabilities are ``fractions.Fraction`` throughout. An :class:`Instance`
holds the type spaces, the (independent) marginal priors and the set of
alternatives with a designated slack alternative ``k0``. Ex post rules map
``(k, t1, t2)`` to a probability; interim rules map ``(k, t_i)`` per player.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Union

RationalLike = Union[Fraction, int, str]

ZERO = Fraction(0)
ONE = Fraction(1)


class InstanceError(ValueError):
    """Base class for malformed instances."""


class ZeroOrNegativePrior(InstanceError):
    pass


class PriorNotNormalized(InstanceError):
    pass


class MissingK0(InstanceError):
    pass


class EmptyTypeSpace(InstanceError):
    pass


class InfeasibleExPost(ValueError):
    """An ex post rule is negative somewhere or does not sum to one."""


class AssumptionViolated(ValueError):
    """The binary-type-space requirement for the full characterization fails."""


def as_fraction(x: RationalLike) -> Fraction:
    if isinstance(x, float):
        raise TypeError(f"refusing float {x!r}; pass a Fraction, int or 'p/q' string")
    return Fraction(x)


@dataclass(frozen=True, eq=True)
class Instance:
    t1: tuple
    t2: tuple
    lambda1: Mapping[str, Fraction]
    lambda2: Mapping[str, Fraction]
    alternatives: tuple
    k0: str

    def __post_init__(self):
        object.__setattr__(self, "t1", tuple(self.t1))
        object.__setattr__(self, "t2", tuple(self.t2))
        object.__setattr__(self, "alternatives", tuple(self.alternatives))
        object.__setattr__(self, "lambda1", {t: as_fraction(v) for t, v in self.lambda1.items()})
        object.__setattr__(self, "lambda2", {t: as_fraction(v) for t, v in self.lambda2.items()})

    @classmethod
    def uniform(cls, t1: Iterable[str], t2: Iterable[str], alternatives: Iterable[str],
                k0: str | None = None) -> "Instance":
        t1, t2, alternatives = tuple(t1), tuple(t2), tuple(alternatives)
        return cls(
            t1=t1,
            t2=t2,
            lambda1={t: Fraction(1, len(t1)) for t in t1},
            lambda2={t: Fraction(1, len(t2)) for t in t2},
            alternatives=alternatives,
            k0=alternatives[0] if k0 is None else k0,
        )

    @property
    def k_star(self) -> tuple:
        return tuple(k for k in self.alternatives if k != self.k0)

    def types(self, player: int) -> tuple:
        return self.t1 if player == 1 else self.t2

    def prior(self, player: int) -> Mapping[str, Fraction]:
        return self.lambda1 if player == 1 else self.lambda2

    def joint(self, a: str, b: str) -> Fraction:
        """Prior probability of the profile (a, b); always the product of marginals."""
        return self.lambda1[a] * self.lambda2[b]

    def mass(self, e1: Iterable[str], e2: Iterable[str]) -> Fraction:
        """lambda(E1 x E2)."""
        return sum(self.lambda1[a] for a in e1) * sum(self.lambda2[b] for b in e2)

    def profiles(self):
        for a in self.t1:
            for b in self.t2:
                yield a, b

    @property
    def satisfies_assumption(self) -> bool:
        return min(len(self.t1), len(self.t2)) == 2

    def swapped(self) -> "Instance":
        return Instance(self.t2, self.t1, self.lambda2, self.lambda1, self.alternatives, self.k0)


def validate_instance(inst: Instance) -> None:
    if not inst.t1 or not inst.t2:
        raise EmptyTypeSpace("both players need at least one type")
    for player, types, prior in ((1, inst.t1, inst.lambda1), (2, inst.t2, inst.lambda2)):
        if len(set(types)) != len(types):
            raise InstanceError(f"duplicate type labels for player {player}")
        if set(prior) != set(types):
            raise InstanceError(f"prior of player {player} does not match its type labels")
        for t in types:
            if prior[t] <= 0:
                raise ZeroOrNegativePrior(f"lambda{player}({t}) = {prior[t]} is not positive")
        total = sum(prior.values())
        if total != 1:
            raise PriorNotNormalized(f"lambda{player} sums to {total}")
    if len(set(inst.alternatives)) != len(inst.alternatives):
        raise InstanceError("duplicate alternative labels")
    if inst.k0 not in inst.alternatives:
        raise MissingK0(f"k0 = {inst.k0!r} is not an alternative")


@dataclass(frozen=True)
class ExPostRule:
    """Lottery over alternatives for each type profile, keyed ``(k, t1, t2)``."""

    q: Mapping[tuple, Fraction]

    def __post_init__(self):
        object.__setattr__(self, "q", {key: as_fraction(v) for key, v in self.q.items()})

    def __getitem__(self, key) -> Fraction:
        return self.q.get(key, ZERO)

    @classmethod
    def constant(cls, inst: Instance, k: str) -> "ExPostRule":
        return cls({(j, a, b): ONE if j == k else ZERO
                    for j in inst.alternatives for a, b in inst.profiles()})

    def swapped(self) -> "ExPostRule":
        return ExPostRule({(k, b, a): v for (k, a, b), v in self.q.items()})

    def combine(self, other: "ExPostRule", alpha: Fraction) -> "ExPostRule":
        keys = set(self.q) | set(other.q)
        return ExPostRule({key: alpha * self[key] + (1 - alpha) * other[key] for key in keys})


@dataclass(frozen=True)
class InterimRule:
    """Interim allocation probabilities; ``q1[(k, t1)]`` and ``q2[(k, t2)]``.

    Entries missing from the maps read as zero. A rule may cover only the
    non-slack alternatives; :func:`complete_with_slack` fills in ``k0``.
    """

    q1: Mapping[tuple, Fraction]
    q2: Mapping[tuple, Fraction]

    def __post_init__(self):
        object.__setattr__(self, "q1", {key: as_fraction(v) for key, v in self.q1.items()})
        object.__setattr__(self, "q2", {key: as_fraction(v) for key, v in self.q2.items()})

    def get(self, player: int, k: str, t: str) -> Fraction:
        table = self.q1 if player == 1 else self.q2
        return table.get((k, t), ZERO)

    def restrict(self, alternatives: Iterable[str]) -> "InterimRule":
        keep = set(alternatives)
        return InterimRule({key: v for key, v in self.q1.items() if key[0] in keep},
                           {key: v for key, v in self.q2.items() if key[0] in keep})

    def swapped(self) -> "InterimRule":
        return InterimRule(self.q2, self.q1)

    def scaled(self, alpha: Fraction) -> "InterimRule":
        return InterimRule({key: alpha * v for key, v in self.q1.items()},
                           {key: alpha * v for key, v in self.q2.items()})


def check_ex_post_feasible(q: ExPostRule, inst: Instance | None = None) -> bool:
    """True iff q is nonnegative and sums to exactly one at every profile.

    Without an instance, the profiles are those appearing in ``q``.
    """
    if any(v < 0 for v in q.q.values()):
        return False
    if inst is None:
        totals: dict = {}
        for (k, a, b), v in q.q.items():
            totals[(a, b)] = totals.get((a, b), ZERO) + v
        return all(s == 1 for s in totals.values())
    return all(sum(q[(k, a, b)] for k in inst.alternatives) == 1 for a, b in inst.profiles())


def reduce(inst: Instance, q: ExPostRule) -> InterimRule:
    """Interim (reduced-form) rule of a feasible ex post rule, complete over all alternatives."""
    if not check_ex_post_feasible(q, inst):
        raise InfeasibleExPost("ex post rule is not a lottery at every profile")
    q1 = {(k, a): sum((q[(k, a, b)] * inst.lambda2[b] for b in inst.t2), ZERO)
          for k in inst.alternatives for a in inst.t1}
    q2 = {(k, b): sum((q[(k, a, b)] * inst.lambda1[a] for a in inst.t1), ZERO)
          for k in inst.alternatives for b in inst.t2}
    return InterimRule(q1, q2)


def complete_with_slack(inst: Instance, partial: InterimRule) -> InterimRule:
    """Set the k0 entries to one minus the non-slack mass; may go negative."""
    ks = inst.k_star
    q1 = {(k, a): partial.get(1, k, a) for k in ks for a in inst.t1}
    q2 = {(k, b): partial.get(2, k, b) for k in ks for b in inst.t2}
    for a in inst.t1:
        q1[(inst.k0, a)] = ONE - sum((q1[(k, a)] for k in ks), ZERO)
    for b in inst.t2:
        q2[(inst.k0, b)] = ONE - sum((q2[(k, b)] for k in ks), ZERO)
    return InterimRule(q1, q2)


def interim_equal(inst: Instance, a: InterimRule, b: InterimRule, alternatives=None) -> bool:
    alts = inst.alternatives if alternatives is None else alternatives
    return all(a.get(1, k, t) == b.get(1, k, t) for k in alts for t in inst.t1) and \
        all(a.get(2, k, t) == b.get(2, k, t) for k in alts for t in inst.t2)


def weighted(inst: Instance, Q: InterimRule, player: int, k: str, t: str) -> Fraction:
    """Q_i^k(t) * lambda_i(t), the ex ante mass type t puts on k."""
    return Q.get(player, k, t) * inst.prior(player)[t]


# -- verdicts ---------------------------------------------------------------

@dataclass(frozen=True)
class CutTriple:
    g: tuple
    e1: tuple
    e2: tuple

    def __str__(self):
        def fmt(s):
            return "{" + ",".join(s) + "}"
        return f"G={fmt(self.g)} E1={fmt(self.e1)} E2={fmt(self.e2)}"


@dataclass(frozen=True)
class Conic:
    """Ex ante masses of alternative k differ between the players."""
    k: str

    def __str__(self):
        return f"CONIC k={self.k}"


@dataclass(frozen=True)
class Negative:
    player: int
    k: str
    t: str

    def __str__(self):
        return f"NEGATIVE player={self.player} k={self.k} t={self.t}"


@dataclass(frozen=True)
class Cut:
    triple: CutTriple
    lhs: Fraction
    rhs: Fraction

    def __str__(self):
        return f"CUT {self.triple} lhs={self.lhs} rhs={self.rhs}"


Violation = Union[Conic, Negative, Cut]


@dataclass(frozen=True)
class Implementable:
    witness: ExPostRule


@dataclass(frozen=True)
class NotImplementable:
    certificate: Violation


@dataclass(frozen=True)
class InequalitiesHold:
    """Necessary-only outcome: every inequality holds, implementability not claimed."""


Verdict = Union[Implementable, NotImplementable, InequalitiesHold]
