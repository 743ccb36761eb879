from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from redform.core import (
    EmptyTypeSpace,
    ExPostRule,
    InfeasibleExPost,
    Instance,
    InterimRule,
    MissingK0,
    PriorNotNormalized,
    ZeroOrNegativePrior,
    check_ex_post_feasible,
    complete_with_slack,
    interim_equal,
    reduce,
    validate_instance,
)
from redform.generators import gen_random_expost, gen_random_instance


def test_validate_uniform(uniform22):
    validate_instance(uniform22)


@pytest.mark.parametrize("lam1, lam2, exc", [
    ((F(1, 2), F(1, 2), F(0)), (F(1, 2), F(1, 2)), ZeroOrNegativePrior),
    ((F(1, 2), F(1, 2)), (F(1, 3), F(1, 3)), PriorNotNormalized),
    ((F(3, 2), F(-1, 2)), (F(1, 2), F(1, 2)), ZeroOrNegativePrior),
])
def test_validate_rejects_priors(lam1, lam2, exc):
    t1 = tuple("abx"[: len(lam1)])
    t2 = ("c", "d")
    inst = Instance(t1, t2, dict(zip(t1, lam1)), dict(zip(t2, lam2)), ("k0", "k1"), "k0")
    with pytest.raises(exc):
        validate_instance(inst)


def test_validate_missing_k0_and_empty():
    with pytest.raises(MissingK0):
        validate_instance(Instance.uniform("ab", "cd", ("k1", "k2"), k0="k0"))
    with pytest.raises(EmptyTypeSpace):
        validate_instance(Instance((), ("c",), {}, {"c": 1}, ("k0",), "k0"))


def test_floats_refused():
    with pytest.raises(TypeError):
        Instance(("a",), ("c",), {"a": 1.0}, {"c": 1}, ("k0",), "k0")


def test_reduce_constant_rule(uniform22):
    Q = reduce(uniform22, ExPostRule.constant(uniform22, "k1"))
    assert all(Q.get(1, "k1", t) == 1 for t in "ab")
    assert all(Q.get(2, "k1", t) == 1 for t in "cd")


def test_reduce_single_profile(uniform22):
    q = {(k, a, b): F(0) for k in ("k0", "k1") for a in "ab" for b in "cd"}
    for a in "ab":
        for b in "cd":
            q[("k0", a, b)] = F(1)
    q[("k1", "a", "c")], q[("k0", "a", "c")] = F(1), F(0)
    Q = reduce(uniform22, ExPostRule(q))
    assert (Q.get(1, "k1", "a"), Q.get(1, "k1", "b")) == (F(1, 2), 0)
    assert (Q.get(2, "k1", "c"), Q.get(2, "k1", "d")) == (F(1, 2), 0)


def test_reduce_rejects_infeasible(uniform22):
    q = ExPostRule.constant(uniform22, "k0").q.copy()
    q[("k0", "a", "c")] = F(9, 10)
    with pytest.raises(InfeasibleExPost):
        reduce(uniform22, ExPostRule(q))


def test_reduce_normalized_on_random_2x3x3():
    inst = gen_random_instance(11, 2, 3, 3)
    for seed in range(20):
        Q = reduce(inst, gen_random_expost(inst, seed))
        # independent recomputation of the per-type sums straight from q
        q = gen_random_expost(inst, seed)
        for a in inst.t1:
            assert sum(q[(k, a, b)] * inst.lambda2[b] for k in inst.alternatives for b in inst.t2) == 1
            assert sum(Q.get(1, k, a) for k in inst.alternatives) == 1
        for b in inst.t2:
            assert sum(Q.get(2, k, b) for k in inst.alternatives) == 1


def test_complete_with_slack_examples(uniform22):
    zero = complete_with_slack(uniform22, InterimRule({}, {}))
    assert all(zero.get(p, "k0", t) == 1 for p, ts in ((1, "ab"), (2, "cd")) for t in ts)
    full = complete_with_slack(uniform22, InterimRule({("k1", "a"): F(1)}, {}))
    assert full.get(1, "k0", "a") == 0
    inst3 = Instance.uniform("ab", "cd", ("k0", "k1", "k2"))
    neg = complete_with_slack(inst3, InterimRule({("k1", "a"): F(3, 4), ("k2", "a"): F(1, 2)}, {}))
    assert neg.get(1, "k0", "a") == F(-1, 4)


@pytest.mark.parametrize("q, ok", [
    ({("k0", "a", "c"): F(1)}, True),
    ({("k1", "a", "c"): F(-1, 4), ("k0", "a", "c"): F(5, 4)}, False),
    ({("k0", "a", "c"): F(9, 10)}, False),
])
def test_check_ex_post_feasible(q, ok):
    assert check_ex_post_feasible(ExPostRule(q)) is ok


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(0, 10**6), st.integers(0, 12))
def test_reduce_is_affine(seed_a, seed_b, num):
    inst = gen_random_instance(seed_a % 97, 2, 3, 3)
    qa, qb = gen_random_expost(inst, seed_a), gen_random_expost(inst, seed_b)
    alpha = F(num, 12)
    mixed = reduce(inst, qa.combine(qb, alpha))
    ra, rb = reduce(inst, qa), reduce(inst, qb)
    for p in (1, 2):
        for k in inst.alternatives:
            for t in inst.types(p):
                assert mixed.get(p, k, t) == alpha * ra.get(p, k, t) + (1 - alpha) * rb.get(p, k, t)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_slack_completion_inverts_restriction(seed):
    inst = gen_random_instance(seed % 53, 2, 3, 4)
    Q = reduce(inst, gen_random_expost(inst, seed))
    assert interim_equal(inst, complete_with_slack(inst, Q.restrict(inst.k_star)), Q)
