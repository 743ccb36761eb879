from fractions import Fraction as F

import pytest

from redform.characterization import (
    WrongAlternativeCount,
    certificate_valid,
    check_conic,
    check_cuts,
    check_implementable,
    check_necessary,
    check_strassen,
    check_symmetric,
    count_cuts,
    eval_cut,
    iter_cuts,
    subsets,
)
from redform.core import (
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
    reduce,
)
from redform.generators import gen_random_expost, gen_random_instance, gen_random_interim


def test_subsets_order():
    assert subsets("ab") == [(), ("a",), ("a", "b"), ("b",)]
    assert len(subsets("abcd")) == 16


def test_count_cuts_2x2():
    inst = Instance.uniform("ab", "cd", ("k0", "k1"))
    assert count_cuts(inst) == 2 * 4 * 4
    assert count_cuts(Instance.uniform("ab", "cde", ("k0", "k1", "k2"))) == 4 * 4 * 8


@pytest.mark.parametrize("e2, lhs, rhs", [
    (("d",), F(1, 2), F(1, 4)),   # lambda(a, c)
    (("c",), F(0), F(1, 4)),      # lambda(a, d)
])
def test_eval_cut_hand_values(uniform22, clash, e2, lhs, rhs):
    ev = eval_cut(uniform22, clash, CutTriple(("k1",), ("a",), e2))
    assert (ev.lhs, ev.rhs) == (lhs, rhs)
    assert ev.violated is (lhs > rhs)


def test_first_violation_and_string(uniform22, clash):
    assert check_conic(uniform22, clash) == []
    (first,) = check_cuts(uniform22, clash)
    assert first.triple == CutTriple(("k1",), ("a",), ("d",))
    verdict = check_implementable(uniform22, clash)
    assert isinstance(verdict, NotImplementable)
    assert str(verdict.certificate) == "CUT G={k1} E1={a} E2={d} lhs=1/2 rhs=1/4"
    assert certificate_valid(uniform22, clash, verdict.certificate)


def test_all_violations_listed(uniform22, clash):
    found = {(ev.triple.g, ev.triple.e1, ev.triple.e2) for ev in check_cuts(uniform22, clash, mode="all")}
    # every violated triple, recomputed by brute force
    brute = set()
    for g in subsets(uniform22.k_star):
        for e1 in subsets("ab"):
            for e2 in subsets("cd"):
                ev = eval_cut(uniform22, clash, CutTriple(g, e1, e2))
                if ev.lhs > ev.rhs:
                    brute.add((g, e1, e2))
    assert found == brute and (("k1",), ("a",), ("d",)) in found


def test_implementable_example(uniform22, spread):
    verdict = check_implementable(uniform22, spread)
    assert isinstance(verdict, Implementable)
    q = verdict.witness
    assert q[("k1", "a", "c")] == q[("k1", "a", "d")] == 1
    assert q[("k1", "b", "c")] == q[("k1", "b", "d")] == 0
    red = reduce(uniform22, q)
    assert red.get(2, "k1", "c") == red.get(2, "k1", "d") == F(1, 2)


def test_conic_violation(uniform22):
    Q = InterimRule({("k1", "a"): F(1), ("k1", "b"): F(1)}, {("k1", "c"): F(0), ("k1", "d"): F(0)})
    verdict = check_implementable(uniform22, Q)
    assert verdict.certificate == Conic("k1")
    assert str(verdict.certificate) == "CONIC k=k1"


def test_negative_entry_reported_after_conic(uniform22):
    Q = InterimRule({("k1", "a"): F(-1, 2), ("k1", "b"): F(1, 2)}, {("k1", "c"): F(0), ("k1", "d"): F(0)})
    assert check_conic(uniform22, Q) == [Negative(1, "k1", "a")]
    assert isinstance(check_implementable(uniform22, Q).certificate, Negative)


def test_necessary_only_mode():
    inst = Instance.uniform("abc", "def", ("k0", "k1"))
    Q = reduce(inst, gen_random_expost(inst, 3))
    with pytest.raises(AssumptionViolated):
        check_implementable(inst, Q)
    assert isinstance(check_implementable(inst, Q, mode="necessary-only"), InequalitiesHold)


def test_pruned_cuts_only_drop_trivial_rows():
    inst = gen_random_instance(4, 2, 3, 3)
    Q = gen_random_interim(inst, 9, mode="cone")
    full = {ev.triple for ev in iter_cuts(inst, Q)}
    pruned = {ev.triple for ev in iter_cuts(inst, Q, prune=True)}
    assert pruned <= full
    assert all(not t.g or not t.e1 for t in full - pruned)


def test_necessary_matches_unpruned_on_cone_rules():
    for seed in range(40):
        inst = gen_random_instance(seed, 2, 3, 3)
        Q = gen_random_interim(inst, seed, mode="cone")
        if check_conic(inst, Q):
            continue
        assert (check_necessary(inst, Q) is None) == (not check_cuts(inst, Q))


def test_strassen_requires_two_alternatives():
    inst = Instance.uniform("ab", "cd", ("k0", "k1", "k2"))
    with pytest.raises(WrongAlternativeCount):
        check_strassen(inst, InterimRule({}, {}))


def test_strassen_and_symmetric_on_examples(uniform22, clash, spread):
    assert check_strassen(uniform22, clash) is False
    assert check_symmetric(uniform22, clash) is False
    assert check_strassen(uniform22, spread) is True
    assert check_symmetric(uniform22, spread) is True


def test_cut_repr():
    c = Cut(CutTriple(("k1", "k2"), (), ("c", "d")), F(1, 3), F(0))
    assert str(c) == "CUT G={k1,k2} E1={} E2={c,d} lhs=1/3 rhs=0"
