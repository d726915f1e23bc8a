"""Satisfaction, validity, QBF evaluation, and the provability oracle."""

import pytest

from bbkit.circuits import (CircuitStore, QbfFormula, EXISTS, FORALL,
                            qbf_negate)
from bbkit.frames import (KripkeFrame, branching, build_fork, build_bt,
                          enumerate_frames_upto, find_dense_weak_subreduction,
                          frame_from_pairs)
from bbkit.logics import bounded_branching_axiom, build_registry
from bbkit.semantics import (Model, frame_validates, int_frame_validates,
                             provability_oracle, qbf_eval, satisfies,
                             tautology, truth_mask, upsets)


@pytest.fixture
def env():
    st = CircuitStore()
    return st, build_registry(st)


def test_satisfies_basic(env):
    st, _ = env
    p = st.var("p")
    chain = frame_from_pairs(2, [(0, 1)])
    m = Model(chain, {"p": 0b10})
    assert satisfies(st, m, 0, st.box(p))
    assert not satisfies(st, m, 0, p)
    # vacuous box at an endpoint
    assert satisfies(st, m, 1, st.or_(st.box(st.top()), st.box(st.bot())))
    refl = frame_from_pairs(1, [], reflexive=[0])
    m2 = Model(refl, {"p": 0})
    assert not satisfies(st, m2, 0, st.box(p))


def test_frame_validates_simple(env):
    st, _ = env
    p = st.var("p")
    point = frame_from_pairs(1, [])
    assert frame_validates(st, point, st.box(st.bot()))
    refl = frame_from_pairs(1, [], reflexive=[0])
    assert not frame_validates(st, refl, st.box(st.bot()))
    assert frame_validates(st, refl, st.imp(st.box(p), p))


def bb_instance(st, k):
    args = [st.var(f"p{i}") for i in range(k + 1)]
    return bounded_branching_axiom(st, k, args)


def test_fork_validates_bb(env):
    st, _ = env
    fork2 = build_fork(2, reflexive=True)
    assert frame_validates(st, fork2, bb_instance(st, 2))
    fork3 = build_fork(3, reflexive=True)
    assert not frame_validates(st, fork3, bb_instance(st, 2))


def test_bb_equivalence_small(env):
    """branching <= k iff the k-instance validates iff no dense weak map
    onto the (k+1)-fork, over all frames with <= 4 points."""
    st, _ = env
    for k in (1, 2):
        axiom = bb_instance(st, k)
        fork = build_fork(k + 1, reflexive=True)
        for f in enumerate_frames_upto(4):
            validates = frame_validates(st, f, axiom)
            has_map = find_dense_weak_subreduction(f, fork) is not None
            assert validates == (not has_map), (k, f)
            assert (branching(f) <= k) == (not has_map), (k, f)


def test_qbf_eval(env):
    st, _ = env
    q, p = st.var("q"), st.var("p")
    phi = QbfFormula(((EXISTS, q),), q)
    assert qbf_eval(st, phi)
    psi = QbfFormula(((FORALL, q),), st.or_(q, p), (p,))
    assert not qbf_eval(st, psi, {"p": False})
    assert qbf_eval(st, psi, {"p": True})


def test_qbf_negation_involution(env):
    st, _ = env
    q, r, p = st.var("q"), st.var("r"), st.var("p")
    phi = QbfFormula(((EXISTS, q), (FORALL, r)),
                     st.or_(st.and_(q, r), p), (p,))
    neg = qbf_negate(st, phi)
    double = qbf_negate(st, neg)
    for a in (False, True):
        v = qbf_eval(st, phi, {"p": a})
        assert qbf_eval(st, neg, {"p": a}) == (not v)
        assert qbf_eval(st, double, {"p": a}) == v


def test_tautology(env):
    st, _ = env
    p = st.var("p")
    assert tautology(st, st.or_(p, st.neg(p)))
    assert not tautology(st, p)


def test_oracle_axioms(env):
    st, reg = env
    p = st.var("p")
    four = st.imp(st.box(p), st.box(st.box(p)))
    t = st.imp(st.box(p), p)
    assert provability_oracle(st, reg["K4"], four, frame_budget=3).provable
    out = provability_oracle(st, reg["K4"], t, frame_budget=3)
    assert out.refuted
    model, point = out.countermodel
    assert not satisfies(st, model, point, t)
    assert provability_oracle(st, reg["S4"], t, frame_budget=2).provable


def test_oracle_bb(env):
    st, reg = env
    bb2 = bb_instance(st, 2)
    bb1 = bb_instance(st, 1)
    out = provability_oracle(st, reg["GLBB2"], bb2, frame_budget=3,
                             search=False)
    assert not out.refuted
    out1 = provability_oracle(st, reg["GLBB2"], bb1, frame_budget=4)
    assert out1.refuted
    # the countermodel must be a genuine frame for the logic
    assert branching(out1.countermodel[0].frame) <= 2


def test_oracle_never_wrong_verdict(env):
    st, reg = env
    proof_out = provability_oracle(st, reg["K4"],
                                   st.imp(st.box(st.var("p")),
                                          st.box(st.box(st.var("p")))),
                                   frame_budget=3)
    from bbkit.proofs import check_proof
    assert proof_out.provable
    assert check_proof(st, proof_out.proof) is None


def test_intuitionistic_validity(env):
    st, reg = env
    p = st.var("p")
    lem = st.or_(p, st.imp(p, st.bot()))
    chain2 = frame_from_pairs(2, [(0, 1)], reflexive=[0, 1])
    out = int_frame_validates(st, chain2, lem)
    assert out is not None  # excluded middle fails intuitionistically
    point = frame_from_pairs(1, [], reflexive=[0])
    assert int_frame_validates(st, point, lem) is None
    peirce = st.imp(st.imp(st.imp(p, st.var("q")), p), p)
    assert int_frame_validates(st, chain2, peirce) is not None


def test_oracle_ipc(env):
    st, reg = env
    p, q = st.var("p"), st.var("q")
    a1 = st.imp(p, st.imp(q, p))
    assert not provability_oracle(st, reg["IPC"], a1, frame_budget=4,
                                  search=False).refuted
    lem = st.or_(p, st.imp(p, st.bot()))
    assert provability_oracle(st, reg["IPC"], lem, frame_budget=3).refuted


def test_tree_axiom_valid_on_bounded_trees(env):
    """The tree-branching schema holds on branching-<=k trees and fails
    on the (k+1)-star."""
    st, reg = env
    from bbkit.logics import tree_branching_axiom
    args = [st.var(f"p{i}") for i in range(3)]
    ax2 = tree_branching_axiom(st, 2, args)
    from bbkit.frames import enumerate_trees
    for t in enumerate_trees(4, 2, reflexive=True):
        assert int_frame_validates(st, t, ax2, budget=26) is None
    star3 = build_fork(3, reflexive=True)
    assert int_frame_validates(st, star3, ax2, budget=26) is not None


def test_upsets(env):
    st, _ = env
    chain2 = frame_from_pairs(2, [(0, 1)], reflexive=[0, 1])
    assert upsets(chain2) == [0b00, 0b10, 0b11]
