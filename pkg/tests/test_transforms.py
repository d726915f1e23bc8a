"""The proof-construction library: every output must pass the checker."""

import pytest

from bbkit.circuits import (CircuitStore, IRR, REFL, gmt_translate,
                            one_point_translate, positive_translate,
                            substitute, variables)
from bbkit.logics import build_registry
from bbkit.proofs import (Proof, ProofBuilder, assert_valid, check_proof,
                          metrics)
from bbkit.semantics import provability_oracle
from bbkit.templates import derive_taut
from bbkit.transforms import (bool_dec_line, cf_ef_roundtrip,
                              cf_to_e_implication, deduction,
                              e_implication_to_cf, ef_to_cf, gmt_lift,
                              mon_box_line, mon_impl_line, one_point_proof,
                              positive_inverse, positive_proof, scf_to_sf,
                              subst_eq_line, bbox_norm_iff,
                              replace_pattern, fresh_hole, t_box_line)


@pytest.fixture
def env():
    st = CircuitStore()
    return st, build_registry(st)


def test_deduction_single_premise(env):
    st, reg = env
    p = st.var("p")
    pb = ProofBuilder(st, "CF", reg["K4"], premises=[p])
    i = pb.premise(0)
    pb.nec(i)
    proof = assert_valid(st, pb.build())
    rep = deduction(st, proof)
    assert rep.output.conclusion == st.imp(st.bbox(p), st.box(p))
    assert not rep.output.premises
    # generous fixed-plumbing envelope; tightened by the corpus suite
    assert rep.output_size <= 3000 * (rep.input_size + 8) ** 2


def test_deduction_two_premises(env):
    st, reg = env
    p, q = st.var("p"), st.var("q")
    pb = ProofBuilder(st, "CF", reg["K4"], premises=[p, q])
    a = pb.premise(0)
    b = pb.premise(1)
    a5 = pb.ax("a5", p, q)
    pb.mp(b, pb.mp(a, a5))
    rep = deduction(st, assert_valid(st, pb.build()))
    g = st.conj([st.bbox(p), st.bbox(q)])
    assert rep.output.conclusion == st.imp(g, st.and_(p, q))


def test_deduction_empty_premises(env):
    st, reg = env
    p = st.var("p")
    pb = ProofBuilder(st, "CF", reg["K4"])
    pb.conclude(derive_taut(pb, st.imp(p, p)))
    rep = deduction(st, pb.build())
    assert rep.output.conclusion == st.imp(p, p)


def test_subst_eq(env):
    st, reg = env
    p, q, r = st.var("p"), st.var("q"), st.var("r")
    pb = ProofBuilder(st, "CF", reg["K4"])
    hole = st.var("h!0")
    pattern = st.box(st.and_(hole, r))
    line = subst_eq_line(pb, p, q, pattern, hole)
    want = st.imp(st.bbox(st.iff(p, q)),
                  st.iff(st.box(st.and_(p, r)), st.box(st.and_(q, r))))
    assert pb.circuit(line) == want
    assert_valid(st, pb.build())
    out = provability_oracle(st, reg["K4"], want, frame_budget=3,
                             search=False)
    assert not out.refuted


def test_subst_eq_nested_box(env):
    st, reg = env
    p, q = st.var("p"), st.var("q")
    pb = ProofBuilder(st, "CF", reg["K4"])
    hole = st.var("h!0")
    pattern = st.box(st.box(hole))
    line = subst_eq_line(pb, p, q, pattern, hole)
    assert_valid(st, pb.build())
    out = provability_oracle(st, reg["K4"], pb.circuit(line),
                             frame_budget=3, search=False)
    assert not out.refuted


def test_mon_impl(env):
    st, reg = env
    p, q = st.var("h!0"), st.var("h!1")
    psi0, psi1 = st.var("a"), st.var("b")
    chi0, chi1 = st.var("c"), st.var("d")
    pb = ProofBuilder(st, "CF", reg["CPC"])
    pattern = st.or_(st.and_(p, q), p)
    line = mon_impl_line(pb, pattern, [p, q], [psi0, psi1], [chi0, chi1])
    g = st.conj([st.imp(psi0, chi0), st.imp(psi1, chi1)])
    want = st.imp(g, st.imp(st.or_(st.and_(psi0, psi1), psi0),
                            st.or_(st.and_(chi0, chi1), chi0)))
    assert pb.circuit(line) == want
    assert_valid(st, pb.build())


def test_mon_impl_single(env):
    st, reg = env
    h = st.var("h!0")
    a, b = st.var("a"), st.var("b")
    pb = ProofBuilder(st, "CF", reg["CPC"])
    line = mon_impl_line(pb, h, [h], [a], [b])
    assert pb.circuit(line) == st.imp(st.imp(a, b), st.imp(a, b))
    assert_valid(st, pb.build())


def test_mon_box(env):
    st, reg = env
    h0, h1 = st.var("h!0"), st.var("h!1")
    a, b = st.var("a"), st.var("b")
    pb = ProofBuilder(st, "CF", reg["K"])
    pattern = st.and_(h0, st.or_(h1, h0))
    line = mon_box_line(pb, pattern, [h0, h1], [a, b])
    want = st.imp(st.and_(st.box(a), st.or_(st.box(b), st.box(a))),
                  st.box(st.and_(a, st.or_(b, a))))
    assert pb.circuit(line) == want
    assert_valid(st, pb.build())
    out = provability_oracle(st, reg["K4"], want, frame_budget=3,
                             search=False)
    assert not out.refuted


def test_bool_dec(env):
    st, reg = env
    p, q = st.var("p"), st.var("q")
    pb = ProofBuilder(st, "CF", reg["K"])
    phi = st.imp(p, st.and_(q, p))
    line = bool_dec_line(pb, phi, ["p", "q"])
    decs = st.conj([st.or_(st.box(p), st.box(st.neg(p))),
                    st.or_(st.box(q), st.box(st.neg(q)))])
    want = st.imp(decs, st.or_(st.box(phi), st.box(st.neg(phi))))
    assert pb.circuit(line) == want
    assert_valid(st, pb.build())


def test_bool_dec_negation(env):
    st, reg = env
    p = st.var("p")
    pb = ProofBuilder(st, "CF", reg["K"])
    line = bool_dec_line(pb, st.neg(p), ["p"])
    assert_valid(st, pb.build())
    out = provability_oracle(st, reg["K4"], pb.circuit(line),
                             frame_budget=3, search=False)
    assert not out.refuted


def test_one_point_refl(env):
    st, reg = env
    p = st.var("p")
    pb = ProofBuilder(st, "CF", reg["S4"])
    four = pb.ax("4", p)
    t = pb.ax("t", st.box(p))
    from bbkit.templates import chain_line
    chain_line(pb, four, t)
    proof = assert_valid(st, pb.build())
    rep = one_point_proof(st, reg["CPC"], proof, REFL)
    assert rep.output.logic.name == "CPC"
    assert rep.output.conclusion == \
        one_point_translate(st, REFL, proof.conclusion)


def test_one_point_irr(env):
    st, reg = env
    p = st.var("p")
    pb = ProofBuilder(st, "CF", reg["GL"])
    base = derive_taut(pb, st.imp(p, p))
    pb.nec(base)
    proof = assert_valid(st, pb.build())
    rep = one_point_proof(st, reg["CPC"], proof, IRR)
    assert rep.output.conclusion == st.top()


def test_one_point_rejects_bad_star(env):
    st, reg = env
    p = st.var("p")
    pb = ProofBuilder(st, "CF", reg["S4"])
    pb.ax("t", p)
    from bbkit.proofs import ProofError
    with pytest.raises(ProofError):
        one_point_proof(st, reg["CPC"], pb.build(), IRR)


def test_positive_proof_simple(env):
    st, reg = env
    p = st.var("p")
    pb = ProofBuilder(st, "CF", reg["K4"])
    pb.conclude(derive_taut(pb, st.imp(p, p)))
    proof = pb.build()
    rep = positive_proof(st, proof)
    want = positive_translate(st, st.imp(p, p), st.var("r!0"))
    assert rep.output.conclusion == want


def test_positive_proof_efq_box(env):
    st, reg = env
    p = st.var("p")
    pb = ProofBuilder(st, "CF", reg["K4"])
    efq = pb.ax("efq", st.box(p))
    proof = assert_valid(st, pb.build())
    rep = positive_proof(st, proof)
    r = st.var("r!0")
    want = positive_translate(st, st.imp(st.bot(), st.box(p)), r)
    assert rep.output.conclusion == want
    out = provability_oracle(st, reg["K4"], want, frame_budget=3,
                             search=False)
    assert not out.refuted


def test_positive_proof_with_nec_and_subst(env):
    st, reg = env
    p, q = st.var("p"), st.var("q")
    pb = ProofBuilder(st, "SCF", reg["K4"])
    base = derive_taut(pb, st.imp(st.bot(), p))
    n = pb.nec(base)
    pb.subst(n, {p: st.and_(p, q)})
    proof = assert_valid(st, pb.build())
    rep = positive_proof(st, proof)
    assert rep.output.system == "SCF"


def test_positive_inverse(env):
    st, reg = env
    p = st.var("p")
    phi = st.neg(p)
    rep = positive_inverse(st, reg["K4"], phi)
    assert_valid(st, rep.output)
    # conclusion: [guard with bot] -> not p
    node = st.nodes[rep.output.conclusion]
    assert node[0] == "imp" and node[2] == phi


def test_bbox_norm_iff(env):
    st, reg = env
    p = st.var("p")
    pb = ProofBuilder(st, "CF", reg["K4"])
    phi = st.box(st.neg(p))
    line = bbox_norm_iff(pb, phi)
    assert_valid(st, pb.build())
    out = provability_oracle(st, reg["K4"], pb.circuit(line),
                             frame_budget=3, search=False)
    assert not out.refuted


def test_cf_ef_roundtrip(env):
    st, reg = env
    p, q = st.var("p"), st.var("q")
    pb = ProofBuilder(st, "CF", reg["K4"])
    base = derive_taut(pb, st.imp(p, p))
    n = pb.nec(base)
    from bbkit.templates import derive_by_taut
    derive_by_taut(pb, st.or_(st.box(st.imp(p, p)), st.box(q)), (n,))
    proof = assert_valid(st, pb.build())
    phi = proof.conclusion

    rep_ef = cf_ef_roundtrip(st, "to-EF", proof)
    assert rep_ef.output.system == "EF"
    rep_cf = cf_ef_roundtrip(st, "to-CF", rep_ef.output, phi=phi)
    assert rep_cf.output.system == "CF"
    assert rep_cf.output.conclusion == phi


def test_cf_ef_single_variable(env):
    st, reg = env
    p = st.var("p")
    pb = ProofBuilder(st, "CF", reg["K4"])
    derive_taut(pb, st.imp(p, p))
    mid, enc = cf_to_e_implication(st, pb.build())
    assert mid.output.conclusion == st.imp(enc.e_circuit, enc.output_var)
    back = e_implication_to_cf(st, mid.output, st.imp(p, p))
    assert back.output.conclusion == st.imp(p, p)


def test_scf_to_sf_axiom_and_subst(env):
    st, reg = env
    p, q = st.var("p"), st.var("q")
    pb = ProofBuilder(st, "SCF", reg["K4"])
    i = pb.ax("4", p)
    pb.subst(i, {p: st.and_(p, q)})
    proof = assert_valid(st, pb.build())
    rep = scf_to_sf(st, proof)
    assert rep.output.system == "SF"
    node = st.nodes[rep.output.conclusion]
    assert node[0] == "imp"


def test_scf_to_sf_mp_nec(env):
    st, reg = env
    p = st.var("p")
    pb = ProofBuilder(st, "SCF", reg["K4"])
    a1 = pb.ax("a1", p, p)
    base = derive_taut(pb, st.imp(p, p))
    pb.nec(base)
    proof = assert_valid(st, pb.build())
    rep = scf_to_sf(st, proof)
    assert rep.output.system == "SF"


def test_scf_to_sf_ceq(env):
    st, reg = env
    p = st.var("p")
    pp = st.and_(p, p)
    pb = ProofBuilder(st, "SCF", reg["K4"])
    big1 = st.imp(p, st.and_(pp, pp))
    big2 = st.imp(p, st.and_(st.and_(p, p), pp))
    base = derive_taut(pb, big1)
    pb.ceq(base, big2)
    proof = assert_valid(st, pb.build())
    rep = scf_to_sf(st, proof)
    assert rep.output.system == "SF"


def test_gmt_lift_ipc(env):
    st, reg = env
    p = st.var("p")
    pb = ProofBuilder(st, "CF", reg["IPC"])
    i = pb.ax("a1", p, p)
    a2 = pb.ax("a2", p, st.imp(p, p), p)
    half = pb.mp(i, a2)
    pb.mp(pb.ax("a1", p, st.imp(p, p)) if False else pb.ax("a1", p, p), half)
    proof = assert_valid(st, pb.build())
    rep = gmt_lift(st, proof, reg["S4"])
    assert rep.output.conclusion == gmt_translate(st, proof.conclusion)
    out = provability_oracle(st, reg["S4"], rep.output.conclusion,
                             frame_budget=3, search=False)
    assert not out.refuted


def test_t_box(env):
    st, reg = env
    p, q = st.var("p"), st.var("q")
    pb = ProofBuilder(st, "CF", reg["S4"])
    line = t_box_line(pb, st.imp(p, q))
    t = gmt_translate(st, st.imp(p, q))
    assert pb.circuit(line) == st.iff(t, st.box(t))
    line2 = t_box_line(pb, st.or_(p, st.and_(q, st.bot())))
    assert_valid(st, pb.build())


def test_gmt_lift_tk(env):
    st, reg = env
    p, q, r = st.var("p"), st.var("q"), st.var("r")
    pb = ProofBuilder(st, "CF", reg["T2"])
    pb.ax("tk2", p, q, r)
    proof = assert_valid(st, pb.build())
    rep = gmt_lift(st, proof, reg["S4BB2"])
    assert rep.output.logic.name == "S4BB2"
    out = provability_oracle(st, reg["S4BB2"], rep.output.conclusion,
                             frame_budget=3, search=False)
    assert not out.refuted


def test_replace_pattern(env):
    st, _ = env
    p, q = st.var("p"), st.var("q")
    root = st.and_(st.box(p), st.or_(st.box(p), q))
    hole = fresh_hole(st, [root])
    pattern = replace_pattern(st, root, st.box(p), hole)
    assert substitute(st, {hole: st.box(p)}, pattern) == root
    assert st.box(p) not in __import__(
        "bbkit.circuits", fromlist=["subcircuits"]).subcircuits(st, pattern)
