"""Scope plumbing, the classical prover, and modal combinators."""

import itertools

import pytest

from bbkit.circuits import CircuitStore
from bbkit.logics import build_registry
from bbkit.proofs import ProofBuilder, assert_valid
from bbkit.templates import (Scope, TautologyError, box_conj, box_conj_list,
                             box_mono, box_under, bbox_intro, bbox_mp,
                             bbox_persist, chain_line, derive_by_taut,
                             derive_taut, excluded_middle, guard_mp,
                             prove_classical, refl_line, weaken_line)


@pytest.fixture
def env():
    st = CircuitStore()
    return st, build_registry(st)


def pb_for(st, reg, name="CPC", system="CF"):
    return ProofBuilder(st, system, reg[name])


def test_refl_weaken_chain(env):
    st, reg = env
    pb = pb_for(st, reg)
    p, q, r = st.var("p"), st.var("q"), st.var("r")
    assert pb.circuit(refl_line(pb, p)) == st.imp(p, p)
    base = pb.ax("a1", p, q)
    w = weaken_line(pb, r, base)
    assert pb.circuit(w) == st.imp(r, st.imp(p, st.imp(q, p)))
    assert_valid(st, pb.build())


def test_scope_basics(env):
    st, reg = env
    pb = pb_for(st, reg)
    p, q = st.var("p"), st.var("q")
    sc = Scope(pb, [p, st.imp(p, q)])
    f = sc.mp(sc.hyp(0), sc.hyp(1))
    assert pb.circuit(f) == st.imp(st.and_(p, st.imp(p, q)), q)
    assert_valid(st, pb.build())


def test_scope_lift_and_curry(env):
    st, reg = env
    pb = pb_for(st, reg)
    p, q = st.var("p"), st.var("q")
    sc = Scope(pb, [p])
    f = sc.hyp(0)
    lifted = sc.lift(f, q)
    assert pb.circuit(lifted) == st.imp(st.and_(p, q), p)
    back = sc.curry(lifted, q)
    assert pb.circuit(back) == st.imp(p, st.imp(q, p))
    assert_valid(st, pb.build())


def test_excluded_middle(env):
    st, reg = env
    pb = pb_for(st, reg)
    p = st.var("p")
    line = excluded_middle(pb, p)
    assert pb.circuit(line) == st.or_(p, st.neg(p))
    assert_valid(st, pb.build())


TAUTS = [
    "imp p p",
    "or p (not p)",
    "imp (and p q) (and q p)",
    "imp (imp p q) (imp (not q) (not p))",
    "imp (not (not p)) p",
    "or (imp p q) (imp q p)",
    "imp (imp (or p q) r) (and (imp p r) (imp q r))",
    "imp bot q",
    "imp (and (or p q) (and (imp p r) (imp q r))) r",
    "iff-demorgan",
]


def _mk(st, text):
    p, q, r = st.var("p"), st.var("q"), st.var("r")
    table = {
        "imp p p": st.imp(p, p),
        "or p (not p)": st.or_(p, st.neg(p)),
        "imp (and p q) (and q p)": st.imp(st.and_(p, q), st.and_(q, p)),
        "imp (imp p q) (imp (not q) (not p))":
            st.imp(st.imp(p, q), st.imp(st.neg(q), st.neg(p))),
        "imp (not (not p)) p": st.imp(st.neg(st.neg(p)), p),
        "or (imp p q) (imp q p)": st.or_(st.imp(p, q), st.imp(q, p)),
        "imp (imp (or p q) r) (and (imp p r) (imp q r))":
            st.imp(st.imp(st.or_(p, q), r),
                   st.and_(st.imp(p, r), st.imp(q, r))),
        "imp bot q": st.imp(st.bot(), q),
        "imp (and (or p q) (and (imp p r) (imp q r))) r":
            st.imp(st.and_(st.or_(p, q),
                           st.and_(st.imp(p, r), st.imp(q, r))), r),
        "iff-demorgan": st.iff(st.neg(st.and_(p, q)),
                               st.or_(st.neg(p), st.neg(q))),
    }
    return table[text]


@pytest.mark.parametrize("text", TAUTS)
def test_derive_taut(env, text):
    st, reg = env
    pb = pb_for(st, reg)
    target = _mk(st, text)
    line = derive_taut(pb, target)
    assert pb.circuit(line) == target
    assert_valid(st, pb.build())


def test_derive_taut_rejects_non_taut(env):
    st, reg = env
    pb = pb_for(st, reg)
    p, q = st.var("p"), st.var("q")
    with pytest.raises(TautologyError):
        derive_taut(pb, st.imp(p, q))


def test_derive_taut_modal_atoms(env):
    st, reg = env
    pb = pb_for(st, reg, "K4")
    p, q = st.var("p"), st.var("q")
    target = st.imp(st.and_(st.box(p), st.box(q)), st.box(p))
    derive_taut(pb, target)
    assert_valid(st, pb.build())


def test_derive_by_taut(env):
    st, reg = env
    pb = pb_for(st, reg, "K4")
    p, q = st.var("p"), st.var("q")
    l1 = pb.ax("4", p)
    target = st.imp(st.and_(st.box(p), q), st.box(st.box(p)))
    line = derive_by_taut(pb, target, (l1,))
    assert pb.circuit(line) == target
    assert_valid(st, pb.build())


def test_box_combinators(env):
    st, reg = env
    pb = pb_for(st, reg, "K4")
    p, q, r = st.var("p"), st.var("q"), st.var("r")
    m = box_mono(pb, pb.ax("a3", p, q))
    assert pb.circuit(m) == st.imp(st.box(st.and_(p, q)), st.box(p))
    bc = box_conj(pb, p, q)
    assert pb.circuit(bc) == st.imp(st.and_(st.box(p), st.box(q)),
                                    st.box(st.and_(p, q)))
    bl = box_conj_list(pb, [p, q, r])
    assert pb.circuit(bl) == st.imp(
        st.conj([st.box(p), st.box(q), st.box(r)]),
        st.box(st.conj([p, q, r])))
    assert_valid(st, pb.build())


def test_bbox_and_guard(env):
    st, reg = env
    pb = pb_for(st, reg, "K4")
    p, q = st.var("p"), st.var("q")
    per = bbox_persist(pb, p)
    assert pb.circuit(per) == st.imp(st.bbox(p), st.box(st.bbox(p)))
    bm = bbox_mp(pb, p, q)
    assert pb.circuit(bm) == st.imp(
        st.and_(st.bbox(p), st.bbox(st.imp(p, q))), st.bbox(q))
    # guard_mp: from conj(bbox g) -> b to conj(bbox g) -> bbox b
    ante = st.conj([st.bbox(p), st.bbox(st.imp(p, q))])
    line = derive_by_taut(pb, st.imp(ante, q), (bm,))
    out = guard_mp(pb, [p, st.imp(p, q)], line)
    assert pb.circuit(out) == st.imp(ante, st.bbox(q))
    assert_valid(st, pb.build())


def test_box_under(env):
    st, reg = env
    pb = pb_for(st, reg, "K4")
    p, q = st.var("p"), st.var("q")
    ante = st.conj([st.box(p), st.box(q)])
    line = derive_taut(pb, st.imp(ante, st.box(p)))
    out = box_under(pb, [p, q], line)
    assert pb.circuit(out) == st.imp(ante, st.box(st.box(p)))
    assert_valid(st, pb.build())


def test_prove_classical_proof_object(env):
    st, reg = env
    p = st.var("p")
    proof = prove_classical(st, reg["CPC"],
                            st.or_(p, st.neg(p)))
    assert_valid(st, proof)
    assert proof.conclusion == st.or_(p, st.neg(p))
