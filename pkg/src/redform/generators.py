"""Example instances and seeded random families for fuzzing.

All randomness goes through ``random.Random(seed)`` so a (generator, seed)
pair always reproduces the same instance and rule.
"""
from __future__ import annotations

import random
from fractions import Fraction
from typing import Sequence

from .core import (
    ONE,
    ZERO,
    ExPostRule,
    Instance,
    InterimRule,
    complete_with_slack,
    validate_instance,
    weighted,
)

PACKAGE_ALTERNATIVES = ("AB|-", "A|B", "B|A", "-|AB")
NO_TRADE = "A|B"


class OutOfRange(ValueError):
    pass


def independent_to_correlated(q1A, q1B) -> dict:
    """Joint lottery over partitions induced by separate lotteries for items A and B.

    Player 1 keeps A with probability ``q1A`` and receives B with probability
    ``q1B``; player 2 gets the complements.
    """
    q1A, q1B = Fraction(q1A), Fraction(q1B)
    for v in (q1A, q1B):
        if not 0 <= v <= 1:
            raise OutOfRange(f"{v} is not a probability")
    q2A, q2B = 1 - q1A, 1 - q1B
    return dict(zip(PACKAGE_ALTERNATIVES, (q1A * q1B, q1A * q2B, q1B * q2A, q2A * q2B)))


def item_marginals(lottery: dict) -> tuple[Fraction, Fraction]:
    """Probabilities that player 1 holds A and holds B under a partition lottery."""
    both, a_only, b_only, _ = (lottery[d] for d in PACKAGE_ALTERNATIVES)
    return both + a_only, both + b_only


def is_product_form(lottery: dict) -> bool:
    """Whether the lottery comes from independent item lotteries.

    Any such pair is pinned down by the item marginals, so the lottery is a
    product iff the marginals reproduce the bundle probability.
    """
    q1A, q1B = item_marginals(lottery)
    if any(not 0 <= v <= 1 for v in (q1A, q1B)):
        return False
    return independent_to_correlated(q1A, q1B) == {d: lottery[d] for d in PACKAGE_ALTERNATIVES}


def _prior(labels: Sequence[str], prior) -> dict:
    if prior is None or prior == "uniform":
        return {t: Fraction(1, len(labels)) for t in labels}
    values = [Fraction(v) for v in prior]
    if len(values) != len(labels):
        raise ValueError("prior length does not match the type labels")
    return dict(zip(labels, values))


def gen_package_exchange(t2_size: int = 2, prior1=None, prior2=None,
                         k0: str = NO_TRADE) -> Instance:
    """Two-item barter: player 1 has two ordinal types, player 2 has ``t2_size`` types."""
    if t2_size < 2:
        raise ValueError("t2_size must be at least 2")
    t1 = ("AB>A>B", "AB>B>A")
    t2 = ("AB>A>B", "AB>B>A") + tuple(f"v{i}" for i in range(3, t2_size + 1))
    inst = Instance(t1, t2, _prior(t1, prior1), _prior(t2, prior2), PACKAGE_ALTERNATIVES, k0)
    validate_instance(inst)
    return inst


def gen_compromise(prior1=None, prior2=None) -> Instance:
    """Three alternatives with k0 the compromise; strong and weak types for both players."""
    types = ("strong", "weak")
    inst = Instance(types, types, _prior(types, prior1), _prior(types, prior2),
                    ("k0", "k1", "k2"), "k0")
    validate_instance(inst)
    return inst


def gen_risk_attitude(n_alternatives: int = 3, prior1=None, prior2=None) -> Instance:
    """Risk-neutral / risk-averse types; payoffs are not modelled."""
    types = ("neutral", "averse")
    alts = tuple(f"k{i}" for i in range(n_alternatives))
    inst = Instance(types, types, _prior(types, prior1), _prior(types, prior2), alts, "k0")
    validate_instance(inst)
    return inst


def gen_random_instance(seed: int, t1_size: int = 2, t2_size: int = 2,
                        n_alternatives: int = 2, uniform: bool = False,
                        high: int = 6) -> Instance:
    rng = random.Random(seed)
    t1 = tuple(f"r{i + 1}" for i in range(t1_size))
    t2 = tuple(f"s{i + 1}" for i in range(t2_size))
    alts = tuple(f"k{i}" for i in range(n_alternatives))
    if uniform:
        return Instance.uniform(t1, t2, alts, "k0")

    def draw(labels):
        w = [rng.randint(1, high) for _ in labels]
        s = sum(w)
        return {t: Fraction(x, s) for t, x in zip(labels, w)}

    return Instance(t1, t2, draw(t1), draw(t2), alts, "k0")


def gen_random_expost(inst: Instance, seed: int, high: int = 9,
                      zero_prob: float = 0.0) -> ExPostRule:
    """Per profile, positive integer weights normalized by their sum.

    ``zero_prob`` > 0 zeroes weights at random (keeping at least one) to reach
    faces of the feasible set.
    """
    rng = random.Random(seed)
    q = {}
    for a, b in inst.profiles():
        w = [rng.randint(1, high) for _ in inst.alternatives]
        if zero_prob:
            w = [0 if rng.random() < zero_prob else x for x in w]
            if not any(w):
                w[rng.randrange(len(w))] = 1
        s = sum(w)
        for k, x in zip(inst.alternatives, w):
            q[(k, a, b)] = Fraction(x, s)
    return ExPostRule(q)


def gen_random_interim(inst: Instance, seed: int, mode: str = "free", high: int = 9) -> InterimRule:
    """Random interim rule, complete over all alternatives.

    ``free``: each type draws a lottery over alternatives. ``cone``: player 2's
    non-slack columns are then rescaled to match player 1's ex ante masses and
    the slack is recomputed, which may turn it negative.
    """
    if mode not in ("free", "cone"):
        raise ValueError(f"unknown mode {mode!r}")
    rng = random.Random(seed)
    tables = []
    for player in (1, 2):
        table = {}
        for t in inst.types(player):
            w = [rng.randint(0, high) for _ in inst.alternatives]
            if not any(w):
                w[0] = 1
            s = sum(w)
            for k, x in zip(inst.alternatives, w):
                table[(k, t)] = Fraction(x, s)
        tables.append(table)
    Q = InterimRule(*tables)
    if mode == "free":
        return Q
    q2 = dict(Q.q2)
    for k in inst.k_star:
        h1 = sum((weighted(inst, Q, 1, k, a) for a in inst.t1), ZERO)
        h2 = sum((weighted(inst, Q, 2, k, b) for b in inst.t2), ZERO)
        for b in inst.t2:
            q2[(k, b)] = q2[(k, b)] * h1 / h2 if h2 else h1
    return complete_with_slack(inst, InterimRule(Q.q1, q2))


def gen_mixture(inst: Instance, seed: int, high: int = 9) -> InterimRule:
    """Convex combination of a reduced form and a cone-projected rule.

    Lands near the boundary of the feasible set more often than either part.
    """
    from .core import reduce

    rng = random.Random(seed)
    inside = reduce(inst, gen_random_expost(inst, rng.randrange(2**32), zero_prob=0.4))
    other = gen_random_interim(inst, rng.randrange(2**32), mode="cone")
    alpha = Fraction(rng.randint(0, high), high)
    q1 = {key: alpha * inside.q1.get(key, ZERO) + (1 - alpha) * other.q1.get(key, ZERO)
          for key in set(inside.q1) | set(other.q1)}
    q2 = {key: alpha * inside.q2.get(key, ZERO) + (1 - alpha) * other.q2.get(key, ZERO)
          for key in set(inside.q2) | set(other.q2)}
    return InterimRule(q1, q2)


def constant_interim(inst: Instance, k: str) -> InterimRule:
    q1 = {(j, a): ONE if j == k else ZERO for j in inst.alternatives for a in inst.t1}
    q2 = {(j, b): ONE if j == k else ZERO for j in inst.alternatives for b in inst.t2}
    return InterimRule(q1, q2)


GENERATORS = {
    "package": gen_package_exchange,
    "compromise": gen_compromise,
    "risk": gen_risk_attitude,
}
