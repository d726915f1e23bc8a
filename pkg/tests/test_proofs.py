"""The proof-checker kernel: acceptance, rejection, metrics, instantiation."""

import pytest

from bbkit.circuits import CircuitStore
from bbkit.logics import build_registry
from bbkit.proofs import (CheckError, Proof, ProofBuilder, check_proof,
                          instantiate_proof, metrics, schema_match,
                          assert_valid)


@pytest.fixture
def env():
    st = CircuitStore()
    return st, build_registry(st)


def test_axiom_instance_ok(env):
    st, reg = env
    p, q = st.var("p"), st.var("q")
    pb = ProofBuilder(st, "CF", reg["K4"])
    pb.ax("a1", p, q)
    assert check_proof(st, pb.build()) is None


def test_nec_shape_rejected(env):
    st, reg = env
    p, q = st.var("p"), st.var("q")
    proof = Proof("CF", reg["K4"], [], [
        (st.imp(q, st.imp(p, q)), ("ax", "a1", {st.var("?0"): q,
                                                st.var("?1"): p})),
        (st.box(p), ("nec", 0)),
    ])
    err = check_proof(st, proof)
    assert err is not None and err.line == 1
    assert "premise mismatch" in err.reason


def test_ceq_requires_same_formula(env):
    st, reg = env
    p = st.var("p")
    a = st.and_(st.and_(p, p), p)
    b = st.and_(p, st.and_(p, p))
    base = Proof("CF", reg["K4"], [a], [(a, ("prem", 0)), (b, ("ceq", 0))])
    err = check_proof(st, base)
    assert err is not None and err.line == 1

    pp = st.and_(p, p)
    good = Proof("CF", reg["K4"], [st.and_(pp, pp)], [
        (st.and_(pp, pp), ("prem", 0)),
        (st.and_(st.and_(p, p), pp), ("ceq", 0)),
    ])
    assert check_proof(st, good) is None


def test_ceq_not_in_formula_systems(env):
    st, reg = env
    p = st.var("p")
    proof = Proof("F", reg["K4"], [p], [(p, ("prem", 0)), (p, ("ceq", 0))])
    err = check_proof(st, proof)
    assert err is not None and "unavailable" in err.reason


def test_subst_only_in_substitution_systems(env):
    st, reg = env
    p, q = st.var("p"), st.var("q")
    imp = st.imp(p, p)
    lines = [
        (st.imp(p, st.imp(p, p)), ("ax", "a1", {st.var("?0"): p,
                                                st.var("?1"): p})),
        (st.imp(q, st.imp(q, q)), ("subst", 0, {p: q})),
    ]
    assert check_proof(st, Proof("SCF", reg["K4"], [], lines)) is None
    err = check_proof(st, Proof("CF", reg["K4"], [], lines))
    assert err is not None and err.line == 1


def test_extension_freshness(env):
    st, reg = env
    p = st.var("p")
    q = st.var("e!0")
    ok = Proof("EF", reg["K4"], [], [
        (st.iff(q, st.box(p)), ("ext", q, st.box(p))),
        (st.imp(p, st.imp(q, p)), ("ax", "a1", {st.var("?0"): p,
                                                st.var("?1"): q})),
    ])
    # conclusion contains the extension variable: not fresh
    err = check_proof(st, ok)
    assert err is not None and "not fresh" in err.reason

    fine = Proof("EF", reg["K4"], [], [
        (st.iff(q, st.box(p)), ("ext", q, st.box(p))),
        (st.imp(p, st.imp(p, p)), ("ax", "a1", {st.var("?0"): p,
                                                st.var("?1"): p})),
    ])
    assert check_proof(st, fine) is None

    bad_ns = Proof("EF", reg["K4"], [], [
        (st.iff(st.var("z"), p), ("ext", st.var("z"), p)),
    ])
    err = check_proof(st, bad_ns)
    assert err is not None and "namespace" in err.reason


def test_sf_no_premises(env):
    st, reg = env
    p = st.var("p")
    proof = Proof("SF", reg["K4"], [p], [(p, ("prem", 0))])
    err = check_proof(st, proof)
    assert err is not None and "no premises" in err.reason


def test_schema_match(env):
    st, reg = env
    p, q = st.var("p"), st.var("q")
    pat = reg["K4"].axiom("4").pattern
    target = st.imp(st.box(st.and_(p, q)),
                    st.box(st.box(st.and_(p, q))))
    got = schema_match(st, pat, target)
    assert got == {st.var("?0"): st.and_(p, q)}
    assert schema_match(st, st.imp(st.var("?0"), st.var("?0")),
                        st.imp(p, q)) is None
    kpat = reg["K4"].axiom("k").pattern
    target = st.imp(st.box(st.imp(p, p)),
                    st.imp(st.box(p), st.box(p)))
    assert schema_match(st, kpat, target) == {st.var("?0"): p,
                                              st.var("?1"): p}


def test_metrics_and_instantiation(env):
    st, reg = env
    p, q = st.var("p"), st.var("q")
    pb = ProofBuilder(st, "CF", reg["K4"])
    pb.ax("a1", p, q)
    proof = pb.build()
    size, lines = metrics(st, proof)
    assert lines == 1 and size == 4  # p is shared in the DAG

    inst = instantiate_proof(st, proof, {p: st.box(q)})
    assert check_proof(st, inst) is None
    assert len(inst.lines) == len(proof.lines)
    size2, _ = metrics(st, inst)
    assert size2 <= size * (1 + 2)


def test_instantiate_subst_lines(env):
    st, reg = env
    p, q, r = st.var("p"), st.var("q"), st.var("r")
    pb = ProofBuilder(st, "SCF", reg["K4"])
    i = pb.ax("a1", p, q)
    pb.subst(i, {p: st.and_(p, p)})
    proof = assert_valid(st, pb.build())
    inst = instantiate_proof(st, proof, {q: r})
    assert check_proof(st, inst) is None


def test_tree_vs_dag_metrics(env):
    st, reg = env
    p = st.var("p")
    big = p
    for _ in range(4):
        big = st.and_(big, big)
    prem = big
    f_proof = Proof("F", reg["K4"], [prem], [(prem, ("prem", 0))])
    cf_proof = Proof("CF", reg["K4"], [prem], [(prem, ("prem", 0))])
    f_size, _ = metrics(st, f_proof)
    cf_size, _ = metrics(st, cf_proof)
    assert f_size == 31 and cf_size == 5
