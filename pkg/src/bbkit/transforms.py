"""Checked proof constructions: every function here emits a proof (or a
fragment inside a builder) that the kernel checker accepts.

The constructions are structural-induction generators; small fixed
tautologies inside them are produced by the truth-table prover over
coarse atoms, and everything intuitionistic is scripted with the
hypothesis-scope machinery only.
"""

from __future__ import annotations

from dataclasses import dataclass

from .circuits import (CircuitStore, EXT_PREFIX, IRR, MODAL, REFL,
                       bot_to_var, dag_size, normalize_negations,
                       one_point_translate, positive_translate,
                       subcircuits, substitute, variables)
from .logics import LogicSpec, SCHEMA_PREFIX, schema_vars
from .proofs import (Proof, ProofBuilder, ProofError, assert_valid,
                     check_proof, instantiate_proof, metrics)
from .templates import (Scope, boolean_atoms, box_conj, box_conj_list,
                        box_mono, bbox_intro, bbox_mp, bbox_persist,
                        chain_line, conj_proj, derive_by_taut, derive_taut,
                        disj_elim, disj_inj, refl_line, restrict_antecedent,
                        weaken_line)


@dataclass
class TransformReport:
    transform: str
    output: Proof
    input_size: int
    output_size: int
    output_lines: int

    @classmethod
    def make(cls, store: CircuitStore, transform: str, output: Proof,
             input_size: int) -> "TransformReport":
        size, lines = metrics(store, output)
        return cls(transform, output, input_size, size, lines)


def _report(store, name, proof, input_size, conclusion=None):
    assert_valid(store, proof, conclusion)
    return TransformReport.make(store, name, proof, input_size)


# -- feasible deduction -------------------------------------------------------

def deduction(store: CircuitStore, proof: Proof) -> TransformReport:
    """Derivation of phi from premises to a premise-free proof of
    conj(bbox premises) -> phi (transitive modal logics)."""
    if proof.system in ("SF", "SCF"):
        raise ProofError("substitution systems take no premises")
    if proof.logic.language != MODAL:
        raise ProofError("the boxed deduction theorem is modal")
    assert_valid(store, proof)
    guards = [store.bbox(chi) for chi in proof.premises]
    g = store.conj(guards)
    pb = ProofBuilder(store, proof.system, proof.logic)
    sc = Scope(pb, [g] if proof.premises else [])

    # G -> box G, used to push necessitation under the guard
    if proof.premises:
        persists = tuple(bbox_persist(pb, chi) for chi in proof.premises)
        inner = box_conj_list(pb, guards)
        g_boxg = derive_by_taut(pb, store.imp(g, store.box(g)),
                                persists + (inner,))

    facts: list[int] = []
    for idx, (circ, just) in enumerate(proof.lines):
        kind = just[0]
        if kind == "prem":
            chi = proof.premises[just[1]]
            proj = conj_proj(pb, guards, just[1]) if len(guards) > 1 \
                else refl_line(pb, g)
            fact = derive_by_taut(pb, sc.close(circ), (proj,))
        elif kind == "ax":
            fact = sc.admit(pb.axiom(just[1], just[2]))
        elif kind == "mp":
            fact = sc.mp(facts[just[1]], facts[just[2]])
        elif kind == "nec":
            base = facts[just[1]]
            if proof.premises:
                step = pb.mp(pb.nec(base),
                             pb.ax("k", g, proof.lines[just[1]][0]))
                fact = chain_line(pb, g_boxg, step)
            else:
                fact = pb.nec(base)
        elif kind == "ext":
            fact = sc.admit(pb.ext(just[1], just[2]))
        elif kind == "ceq":
            fact = pb.ceq(facts[just[1]], sc.close(circ))
        else:
            raise ProofError(f"unsupported justification {kind}")
        facts.append(fact)
    pb.conclude(facts[-1])
    out = pb.build()
    target = store.imp(g, proof.conclusion) if proof.premises \
        else proof.conclusion
    return _report(store, "deduction", out, metrics(store, proof)[0], target)


# -- substitution of equivalents ----------------------------------------------

def _hole_positions(store: CircuitStore, pattern: int, hole: int) -> bool:
    return hole in subcircuits(store, pattern)


def subst_eq_line(pb: ProofBuilder, phi: int, psi: int, pattern: int,
                  hole: int) -> int:
    """|- bbox(phi iff psi) -> (pattern[phi] iff pattern[psi]);
    ``pattern`` has a designated hole variable (transitive logics)."""
    st = pb.store
    ante = st.bbox(st.iff(phi, psi))
    memo: dict[int, int] = {}

    def build(node: int) -> int:
        """Fact line: ante -> bbox(node[phi] iff node[psi])."""
        if node in memo:
            return memo[node]
        a = substitute(st, {hole: phi}, node)
        b = substitute(st, {hole: psi}, node)
        target = st.imp(ante, st.bbox(st.iff(a, b)))
        if node == hole:
            line = derive_taut(pb, target, atoms=[phi, psi,
                                                  st.box(st.iff(phi, psi))])
        elif hole not in subcircuits(st, node):
            iff_line = derive_taut(pb, st.iff(a, a), atoms=[a])
            line = derive_by_taut(pb, target, (iff_line, pb.nec(iff_line)))
        elif st.tag(node) == "box":
            child = st.children(node)[0]
            sub = build(child)                       # ante -> bbox(ca iff cb)
            ca = substitute(st, {hole: phi}, child)
            cb = substitute(st, {hole: psi}, child)
            iff_c = st.iff(ca, cb)
            dir1 = pb.mp(pb.nec(derive_taut(
                pb, st.imp(iff_c, st.imp(ca, cb)), atoms=[ca, cb])),
                pb.ax("k", iff_c, st.imp(ca, cb)))
            dir2 = pb.mp(pb.nec(derive_taut(
                pb, st.imp(iff_c, st.imp(cb, ca)), atoms=[ca, cb])),
                pb.ax("k", iff_c, st.imp(cb, ca)))
            # d: box(ca iff cb) -> (box ca iff box cb)
            d = derive_by_taut(
                pb, st.imp(st.box(iff_c), st.iff(st.box(ca), st.box(cb))),
                (dir1, dir2, pb.ax("k", ca, cb), pb.ax("k", cb, ca)))
            dd = pb.mp(pb.nec(d), pb.ax("k", st.box(iff_c),
                                        st.iff(st.box(ca), st.box(cb))))
            four = pb.ax("4", iff_c)
            line = derive_by_taut(pb, target, (sub, d, dd, four))
        else:
            kids = st.children(node)
            kid_lines = tuple(build(c) for c in kids)
            olds = [substitute(st, {hole: phi}, c) for c in kids]
            news = [substitute(st, {hole: psi}, c) for c in kids]
            bares = [st.iff(o, n) for o, n in zip(olds, news)]
            atoms = []
            for x in olds + news:
                if x not in atoms:
                    atoms.append(x)
            taut = derive_taut(pb, st.imp(st.conj(bares), st.iff(a, b)),
                               atoms=atoms)
            mono = box_mono(pb, taut)
            bc = box_conj_list(pb, bares)
            line = derive_by_taut(pb, target,
                                  kid_lines + (taut, mono, bc))
        memo[node] = line
        return line

    top = build(pattern)
    a = substitute(st, {hole: phi}, pattern)
    b = substitute(st, {hole: psi}, pattern)
    return derive_by_taut(pb, st.imp(ante, st.iff(a, b)), (top,))


def bbox_subst_eq_line(pb: ProofBuilder, phi: int, psi: int, pattern: int,
                       hole: int) -> int:
    """|- bbox(phi iff psi) -> bbox(pattern[phi] iff pattern[psi])."""
    st = pb.store
    ante = st.bbox(st.iff(phi, psi))
    base = subst_eq_line(pb, phi, psi, pattern, hole)
    a = substitute(st, {hole: phi}, pattern)
    b = substitute(st, {hole: psi}, pattern)
    per = bbox_persist(pb, st.iff(phi, psi))
    boxed = pb.mp(pb.nec(base), pb.ax("k", ante, st.iff(a, b)))
    return derive_by_taut(pb, st.imp(ante, st.bbox(st.iff(a, b))),
                          (base, per, boxed))


def replace_pattern(store: CircuitStore, root: int, old: int,
                    hole: int) -> int:
    """``root`` with every occurrence of ``old`` replaced by the hole
    variable, so that substituting old back recovers ``root``."""
    memo: dict[int, int] = {old: hole}
    for s in subcircuits(store, root):
        if s in memo:
            continue
        tag = store.tag(s)
        if tag == "var":
            memo[s] = s
        else:
            kids = tuple(memo[c] for c in store.children(s))
            memo[s] = store._mk((tag,) + kids)
    return memo[root]


HOLE = "h!"


def fresh_hole(store: CircuitStore, avoid: list[int]) -> int:
    used = set()
    for a in avoid:
        used.update(variables(store, a))
    i = 0
    while f"{HOLE}{i}" in used:
        i += 1
    return store.var(f"{HOLE}{i}")


# -- monotone implication lemmas ----------------------------------------------

def mon_impl_line(pb: ProofBuilder, pattern: int, holes: list[int],
                  psis: list[int], chis: list[int]) -> int:
    """|- conj(psi_i -> chi_i) -> (pattern[psis] -> pattern[chis]);
    pattern must be monotone in its hole variables."""
    st = pb.store
    assert len(holes) == len(psis) == len(chis)
    imps = [st.imp(p, c) for p, c in zip(psis, chis)]
    g = st.conj(imps)
    sub_p = dict(zip(holes, psis))
    sub_c = dict(zip(holes, chis))
    memo: dict[int, int] = {}

    def build(node: int) -> int:
        if node in memo:
            return memo[node]
        a = substitute(st, sub_p, node)
        b = substitute(st, sub_c, node)
        target = st.imp(g, st.imp(a, b))
        if node in holes:
            k = holes.index(node)
            proj = conj_proj(pb, imps, k) if len(imps) > 1 \
                else refl_line(pb, g)
            line = derive_by_taut(pb, target, (proj,))
        elif not (set(subcircuits(st, node)) & set(holes)):
            line = derive_by_taut(pb, target, (refl_line(pb, a),))
        else:
            tag = st.tag(node)
            assert tag in ("and", "or"), \
                "pattern is not monotone in its holes"
            kid_lines = tuple(build(c) for c in st.children(node))
            line = derive_by_taut(pb, target, kid_lines)
        memo[node] = line
        return line

    return build(pattern)


def mon_box_line(pb: ProofBuilder, pattern: int, holes: list[int],
                 psis: list[int]) -> int:
    """|- pattern[box psi_i] -> box pattern[psi_i] for a pattern built
    monotonically from its holes."""
    st = pb.store
    sub_boxed = {h: st.box(p) for h, p in zip(holes, psis)}
    sub_plain = dict(zip(holes, psis))
    memo: dict[int, int] = {}

    def build(node: int) -> int:
        if node in memo:
            return memo[node]
        a = substitute(st, sub_boxed, node)
        inner = substitute(st, sub_plain, node)
        target = st.imp(a, st.box(inner))
        if node in holes:
            line = refl_line(pb, a)
        elif not (set(subcircuits(st, node)) & set(holes)):
            assert not (set(variables(st, node))
                        & {st.var_name(h) for h in holes})
            # hole-free part: need  node -> box node; only constants are
            # guaranteed here, so restrict to top/bot
            if st.tag(node) == "top":
                line = derive_by_taut(pb, target, (pb.nec(pb.ax("top")),))
            elif st.tag(node) == "bot":
                line = pb.ax("efq", st.box(inner))
            else:
                raise ProofError(
                    "monotone pattern may only mix holes with constants")
        else:
            tag = st.tag(node)
            ka, kb = st.children(node)
            fa, fb = build(ka), build(kb)
            ia = substitute(st, sub_plain, ka)
            ib = substitute(st, sub_plain, kb)
            if tag == "and":
                step = box_conj(pb, ia, ib)
                line = derive_by_taut(pb, target, (fa, fb, step))
            elif tag == "or":
                ja = box_mono(pb, pb.ax("a6", ia, ib))
                jb = box_mono(pb, pb.ax("a7", ia, ib))
                line = derive_by_taut(pb, target, (fa, fb, ja, jb))
            else:
                raise ProofError("pattern is not monotone in its holes")
        memo[node] = line
        return line

    return build(pattern)


# -- boolean decidedness under boxes -------------------------------------------

def eval_op(tag: str, va: bool, vb: bool) -> bool:
    if tag == "and":
        return va and vb
    if tag == "or":
        return va or vb
    if tag == "imp":
        return (not va) or vb
    raise AssertionError(tag)


def bool_dec_line(pb: ProofBuilder, phi: int, var_order: list[str]) -> int:
    """|- conj(box p or box not p) -> (box phi or box not phi) for a
    boolean circuit phi over the listed variables."""
    st = pb.store
    assert set(variables(st, phi)) <= set(var_order)
    decs = [st.or_(st.box(st.var(v)), st.box(st.neg(st.var(v))))
            for v in var_order]
    g = st.conj(decs)
    sc = Scope(pb, [g] if decs else [])
    memo: dict[int, int] = {}

    def dec_of(c: int) -> int:
        return st.or_(st.box(c), st.box(st.neg(c)))

    def build(node: int) -> int:
        """Scope fact of (box node or box not node)."""
        if node in memo:
            return memo[node]
        tag = st.tag(node)
        if tag == "var":
            k = var_order.index(st.var_name(node))
            fact = refl_line(pb, g) if len(decs) == 1 \
                else conj_proj(pb, decs, k)
        elif tag == "top":
            line = pb.nec(pb.ax("top"))
            fact = sc.admit(derive_by_taut(pb, dec_of(node), (line,)))
        elif tag == "bot":
            nb = derive_taut(pb, st.neg(st.bot()))
            fact = sc.admit(derive_by_taut(pb, dec_of(node),
                                           (pb.nec(nb),)))
        elif tag == "not":
            child = st.children(node)[0]
            f = build(child)
            dn = box_mono(pb, derive_taut(pb, st.imp(child, st.neg(node)),
                                          atoms=[child]))
            fact = sc.mp(f, sc.admit(derive_by_taut(
                pb, st.imp(dec_of(child), dec_of(node)), (dn,))))
        else:
            a, b = st.children(node)
            fa, fb = build(a), build(b)
            lits_a = [st.box(a), st.box(st.neg(a))]
            lits_b = [st.box(b), st.box(st.neg(b))]
            branch_lines = {}
            for i in (0, 1):
                for j in (0, 1):
                    la = a if i == 0 else st.neg(a)
                    lb = b if j == 0 else st.neg(b)
                    val = eval_op(tag, i == 0, j == 0)
                    lc = node if val else st.neg(node)
                    taut = derive_taut(pb, st.imp(st.and_(la, lb), lc),
                                       atoms=[a, b])
                    branch_lines[i, j] = derive_by_taut(
                        pb, st.imp(st.and_(st.box(la), st.box(lb)),
                                   dec_of(node)),
                        (box_conj(pb, la, lb), box_mono(pb, taut)))

            def outer(sub: Scope, i: int) -> int:
                lifted_fb = sc.lift(fb, lits_a[i])

                def inner(sub2: Scope, j: int) -> int:
                    both = sub2.and_intro(
                        sub2.hyp(len(sub2.hyps) - 2),
                        sub2.hyp(len(sub2.hyps) - 1))
                    return sub2.mp(both, sub2.admit(branch_lines[i, j]))

                return sub.by_disj(lifted_fb, lits_b, inner)

            fact = sc.by_disj(fa, lits_a, outer)
        memo[node] = fact
        return fact

    fact = build(phi)
    if not decs:
        return derive_by_taut(pb, st.imp(st.top(), dec_of(phi)), (fact,))
    return fact


# -- one-point collapse --------------------------------------------------------

def one_point_proof(store: CircuitStore, cpc: LogicSpec, proof: Proof,
                    star: str) -> TransformReport:
    """Translate a circuit proof over a logic valid in the one-point
    frame into a classical proof of the translated conclusion."""
    assert_valid(store, proof)
    if proof.premises:
        raise ProofError("one-point translation takes premise-free proofs")
    if proof.system in ("SF", "SCF"):
        raise ProofError("translate substitution proofs line by line first")
    pb = ProofBuilder(store, "CF", cpc)

    schema_proofs: dict[str, tuple[Proof, list[int]]] = {}

    def schema_proof(schema_id: str) -> tuple[Proof, list[int]]:
        if schema_id not in schema_proofs:
            pattern = proof.logic.axiom(schema_id).pattern
            holes = schema_vars(store, pattern)
            fresh = [store.var(f"h!{i}") for i in range(len(holes))]
            inst = substitute(store, dict(zip(holes, fresh)), pattern)
            translated = one_point_translate(store, star, inst)
            try:
                spb = ProofBuilder(store, "CF", cpc)
                spb.conclude(derive_taut(spb, translated))
                schema_proofs[schema_id] = (spb.build(), fresh)
            except Exception as exc:
                raise ProofError(
                    f"axiom {schema_id} is not valid in the one-point "
                    f"frame ({star})") from exc
        return schema_proofs[schema_id]

    lines: list[int] = []
    for circ, just in proof.lines:
        kind = just[0]
        tcirc = one_point_translate(store, star, circ)
        if kind == "ax":
            base, fresh = schema_proof(just[1])
            pattern = proof.logic.axiom(just[1]).pattern
            holes = schema_vars(store, pattern)
            sigma = {f: one_point_translate(store, star, just[2][h])
                     for f, h in zip(fresh, holes)}
            inst = instantiate_proof(store, base, sigma)
            lines.append(pb.copy_from(inst))
        elif kind == "mp":
            lines.append(pb.mp(lines[just[1]], lines[just[2]]))
        elif kind == "nec":
            if star == IRR:
                lines.append(pb.ax("top"))
            else:
                lines.append(lines[just[1]])
        elif kind == "ceq":
            lines.append(pb.ceq(lines[just[1]], tcirc))
        else:
            raise ProofError(f"unsupported justification {kind}")
        assert pb.circuit(lines[-1]) == tcirc
    pb.conclude(lines[-1])
    target = one_point_translate(store, star, proof.conclusion)
    return _report(store, "one_point", pb.build(),
                   metrics(store, proof)[0], target)


# -- positive form -------------------------------------------------------------

R_GUARD = "r!"


def _positive_rewrite(store: CircuitStore, nid: int, r: int) -> int:
    return bot_to_var(store, normalize_negations(store, nid), r)


def positive_proof(store: CircuitStore, proof: Proof) -> TransformReport:
    """From a (S)CF proof over a positively axiomatized transitive logic,
    a proof of the guarded bot-free form of its conclusion."""
    assert_valid(store, proof)
    if proof.premises:
        raise ProofError("positive lifting takes premise-free proofs")
    st = store
    all_vars = sorted({v for c, _ in proof.lines
                       for v in variables(st, c)})
    i = 0
    while f"{R_GUARD}{i}" in all_vars:
        i += 1
    r = st.var(f"{R_GUARD}{i}")
    guard_items = [st.bbox(st.imp(r, st.box(r)))]
    guard_items += [st.bbox(st.imp(r, st.var(v))) for v in all_vars]
    g = st.conj(guard_items)
    guard_bodies = [st.imp(r, st.box(r))] + \
        [st.imp(r, st.var(v)) for v in all_vars]

    pb = ProofBuilder(st, proof.system, proof.logic)
    sc = Scope(pb, [g])
    persists = tuple(bbox_persist(pb, b) for b in guard_bodies)
    inner = box_conj_list(pb, guard_items)
    g_boxg = derive_by_taut(pb, st.imp(g, st.box(g)), persists + (inner,))

    rmemo: dict[int, int] = {}

    def r_fact(chi: int) -> int:
        """Scope fact of r -> chi for positive chi over the guard vars."""
        if chi in rmemo:
            return rmemo[chi]
        tag = st.tag(chi)
        if chi == r:
            fact = sc.admit(refl_line(pb, r))
        elif tag == "var":
            k = all_vars.index(st.var_name(chi)) + 1
            proj = conj_proj(pb, guard_items, k)
            fact = _from_proj(proj, st.imp(r, chi))
        elif tag == "top":
            fact = sc.admit(derive_by_taut(
                pb, st.imp(r, chi), (pb.ax("top"),)))
        elif tag == "and":
            a, b = st.children(chi)
            fact = _rt(st.imp(r, chi), (r_fact(a), r_fact(b)))
        elif tag == "or":
            a, b = st.children(chi)
            fact = _rt(st.imp(r, chi), (r_fact(a),))
        elif tag == "imp":
            a, b = st.children(chi)
            fact = _rt(st.imp(r, chi), (r_fact(b),))
        elif tag == "box":
            child = st.children(chi)[0]
            f = r_fact(child)                 # g -> (r -> child)
            boxed = chain_line(pb, g_boxg,
                               pb.mp(pb.nec(f),
                                     pb.ax("k", g, st.imp(r, child))))
            pers = conj_proj(pb, guard_items, 0)
            fact = _rt(st.imp(r, chi), (boxed, pers,
                                        pb.ax("k", r, child)))
        else:
            raise ProofError("not a positive circuit")
        rmemo[chi] = fact
        return fact

    def _from_proj(proj_line: int, body: int) -> int:
        return derive_by_taut(pb, st.imp(g, body), (proj_line,))

    def _rt(body: int, extra: tuple[int, ...]) -> int:
        return derive_by_taut(pb, st.imp(g, body), extra)

    def rewrite(nid: int) -> int:
        return _positive_rewrite(st, nid, r)

    facts: list[int] = []
    for circ, just in proof.lines:
        kind = just[0]
        tcirc = rewrite(circ)
        if kind == "ax":
            schema_id = just[1]
            shape = proof.logic.axiom(schema_id).pattern
            if schema_id == "efq":
                fact = r_fact(rewrite(just[2][st.var("?0")]))
            elif schema_id in ("notE", "notI", "top"):
                node = st.nodes[tcirc]
                assert node[0] == "imp" and node[1] == node[2]
                fact = sc.admit(refl_line(pb, node[1]))
            else:
                sigma = {h: rewrite(v) for h, v in just[2].items()}
                fact = sc.admit(pb.axiom(schema_id, sigma))
        elif kind == "mp":
            fact = sc.mp(facts[just[1]], facts[just[2]])
        elif kind == "nec":
            base = facts[just[1]]
            step = pb.mp(pb.nec(base),
                         pb.ax("k", g, rewrite(proof.lines[just[1]][0])))
            fact = chain_line(pb, g_boxg, step)
        elif kind == "subst":
            tau = {p: rewrite(v) for p, v in just[2].items()}
            moved = pb.subst(facts[just[1]], tau)
            new_items = [substitute(st, tau, it) for it in guard_items]
            parts = []
            for item, body in zip(new_items,
                                  [substitute(st, tau, b)
                                   for b in guard_bodies]):
                f_bare = r_fact(st.nodes[body][2])
                f_boxed = chain_line(pb, g_boxg,
                                     pb.mp(pb.nec(f_bare),
                                           pb.ax("k", g, body)))
                parts.append(_rt(item, (f_bare, f_boxed)))
            whole = sc.conj_intro(parts)
            fact = sc.mp(whole, sc.admit(moved))
        elif kind == "ceq":
            fact = pb.ceq(facts[just[1]], sc.close(tcirc))
        else:
            raise ProofError(f"unsupported justification {kind}")
        assert pb.circuit(fact) == sc.close(tcirc)
        facts.append(fact)

    # specialize the guard to the conclusion's variables
    conclusion = proof.conclusion
    final = pb.conclude(facts[-1])
    built = pb.build()
    keep_vars = set(variables(st, normalize_negations(st, conclusion)))
    extras = {st.var(v): st.top() for v in all_vars if v not in keep_vars}
    if extras:
        built = instantiate_proof(st, built, extras)
    target = positive_translate(st, conclusion, r)
    pb2 = ProofBuilder(st, proof.system, proof.logic)
    last = pb2.copy_from(built)
    old_items = [substitute(st, extras, it) for it in guard_items]
    new_items = [it for it in old_items if st.top() not in
                 subcircuits(st, it)]
    provided = {}
    for it in old_items:
        if it not in new_items:
            top_line = pb2.ax("top")
            rt = pb2.mp(top_line, pb2.ax("a1", st.top(), r))
            provided[it] = bbox_intro(pb2, rt)
    if extras:
        last = restrict_antecedent(pb2, last, old_items, new_items, provided)
    pb2.conclude(last)
    out = pb2.build()
    return _report(store, "positive", out, metrics(store, proof)[0], target)


def positive_inverse(store: CircuitStore, logic: LogicSpec,
                     phi: int) -> TransformReport:
    """Proof of (guarded form with the guard variable set to bot) ->
    phi; together with positive_proof this round-trips."""
    st = store
    all_vars = sorted(variables(st, normalize_negations(st, phi)))
    i = 0
    while f"{R_GUARD}{i}" in all_vars:
        i += 1
    r = st.var(f"{R_GUARD}{i}")
    plus = positive_translate(st, phi, r)
    collapsed = substitute(st, {r: st.bot()}, plus)
    phi_norm = normalize_negations(st, phi)
    node = st.nodes[collapsed]
    assert node[0] == "imp" and node[2] == phi_norm

    pb = ProofBuilder(st, "CF", logic)
    items = [st.bbox(st.imp(st.bot(), st.box(st.bot())))] + \
        [st.bbox(st.imp(st.bot(), st.var(v))) for v in all_vars]
    part_lines = [bbox_intro(pb, pb.ax("efq", st.box(st.bot())))] + \
        [bbox_intro(pb, pb.ax("efq", st.var(v))) for v in all_vars]
    sc0 = Scope(pb, [])
    g_line = sc0.conj_intro(part_lines)
    assert pb.circuit(g_line) == node[1]
    sc = Scope(pb, [collapsed])
    f = sc.mp(sc.admit(g_line), sc.hyp(0))
    norm = bbox_norm_iff(pb, phi)
    final = derive_by_taut(
        pb, st.imp(collapsed, phi), (f, norm))
    pb.conclude(final)
    return _report(store, "positive_inverse", pb.build(),
                   dag_size(store, phi), st.imp(collapsed, phi))


def bbox_norm_iff(pb: ProofBuilder, phi: int) -> int:
    """|- bbox(normalized phi iff phi): the normalization rewrites
    negations to implications-to-bot and top to bot-to-bot."""
    st = pb.store
    memo: dict[int, int] = {}

    def build(node: int) -> int:
        if node in memo:
            return memo[node]
        norm = normalize_negations(st, node)
        target = st.bbox(st.iff(norm, node))
        tag = st.tag(node)
        if norm == node:
            base = derive_taut(pb, st.iff(node, node), atoms=[node])
            line = derive_by_taut(pb, target, (base, pb.nec(base)))
        elif tag == "box":
            child = st.children(node)[0]
            sub = build(child)
            cn = normalize_negations(st, child)
            line = _bbox_iff_box_step(pb, sub, cn, child)
        else:
            kids = [build(c) for c in st.children(node)]
            bare_goal = st.iff(norm, node)
            bares = []
            for c in st.children(node):
                nc = normalize_negations(st, c)
                bares.append(st.iff(nc, c))
            taut = derive_taut(
                pb, st.imp(st.conj(bares), bare_goal),
                atoms=_atoms_for(st, st.children(node)))
            mono = box_mono(pb, taut)
            bc = box_conj_list(pb, bares)
            line = derive_by_taut(pb, target, tuple(kids) + (taut, mono, bc))
        memo[node] = line
        return line

    return build(phi)


def _atoms_for(st: CircuitStore, kids) -> list[int]:
    atoms = []
    for c in kids:
        nc = normalize_negations(st, c)
        for x in (nc, c):
            if x not in atoms:
                atoms.append(x)
    return atoms


def _bbox_iff_box_step(pb: ProofBuilder, sub: int, ca: int, cb: int) -> int:
    """From |- bbox(ca iff cb) derive |- bbox(box ca iff box cb)."""
    st = pb.store
    iff_c = st.iff(ca, cb)
    dir1 = pb.mp(pb.nec(derive_taut(
        pb, st.imp(iff_c, st.imp(ca, cb)), atoms=[ca, cb])),
        pb.ax("k", iff_c, st.imp(ca, cb)))
    dir2 = pb.mp(pb.nec(derive_taut(
        pb, st.imp(iff_c, st.imp(cb, ca)), atoms=[ca, cb])),
        pb.ax("k", iff_c, st.imp(cb, ca)))
    d = derive_by_taut(
        pb, st.imp(st.box(iff_c), st.iff(st.box(ca), st.box(cb))),
        (dir1, dir2, pb.ax("k", ca, cb), pb.ax("k", cb, ca)))
    dd = pb.mp(pb.nec(d), pb.ax("k", st.box(iff_c),
                                st.iff(st.box(ca), st.box(cb))))
    four = pb.ax("4", iff_c)
    target = st.bbox(st.iff(st.box(ca), st.box(cb)))
    return derive_by_taut(pb, target, (sub, d, dd, four))


# -- the circuit / extension-variable round trip --------------------------------

from .circuits import ExtensionEncoding, extension_encoding, same_formula


def _bbox_iff_fact(sc: Scope, f_ab: int, f_bc: int, a: int, b: int,
                   c: int) -> int:
    """Facts of bbox(a iff b) and bbox(b iff c) to the fact of
    bbox(a iff c), inside a scope."""
    pb = sc.pb
    st = pb.store
    bare = derive_taut(pb, st.imp(st.and_(st.iff(a, b), st.iff(b, c)),
                                  st.iff(a, c)), atoms=[a, b, c])
    mono = box_mono(pb, bare)
    bc2 = box_conj(pb, st.iff(a, b), st.iff(b, c))
    lemma = derive_by_taut(
        pb, st.imp(st.and_(st.bbox(st.iff(a, b)), st.bbox(st.iff(b, c))),
                   st.bbox(st.iff(a, c))), (bare, mono, bc2))
    return sc.mp(sc.and_intro(f_ab, f_bc), sc.admit(lemma))


def _bbox_cong_fact(sc: Scope, node_tag: str, kid_facts: list[int],
                    olds: list[int], news: list[int]) -> int:
    """From facts bbox(old_i iff new_i) derive the fact of
    bbox(c(olds) iff c(news)) for a non-box connective c."""
    pb = sc.pb
    st = pb.store
    a = st.node(node_tag, olds)
    b = st.node(node_tag, news)
    bares = [st.iff(o, n) for o, n in zip(olds, news)]
    atoms = []
    for x in olds + news:
        if x not in atoms:
            atoms.append(x)
    bare = derive_taut(pb, st.imp(st.conj(bares), st.iff(a, b)), atoms=atoms)
    mono = box_mono(pb, bare)
    bc = box_conj_list(pb, bares)
    lemma = derive_by_taut(
        pb, st.imp(st.conj([st.bbox(x) for x in bares]),
                   st.bbox(st.iff(a, b))), (bare, mono, bc))
    whole = sc.conj_intro(kid_facts)
    return sc.mp(whole, sc.admit(lemma))


def _bbox_box_cong_fact(sc: Scope, kid_fact: int, old: int, new: int) -> int:
    """Fact of bbox(old iff new) to the fact of bbox(box old iff box new)."""
    pb = sc.pb
    st = pb.store
    iff_c = st.iff(old, new)
    dir1 = pb.mp(pb.nec(derive_taut(
        pb, st.imp(iff_c, st.imp(old, new)), atoms=[old, new])),
        pb.ax("k", iff_c, st.imp(old, new)))
    dir2 = pb.mp(pb.nec(derive_taut(
        pb, st.imp(iff_c, st.imp(new, old)), atoms=[old, new])),
        pb.ax("k", iff_c, st.imp(new, old)))
    d = derive_by_taut(
        pb, st.imp(st.box(iff_c), st.iff(st.box(old), st.box(new))),
        (dir1, dir2, pb.ax("k", old, new), pb.ax("k", new, old)))
    dd = pb.mp(pb.nec(d), pb.ax("k", st.box(iff_c),
                                st.iff(st.box(old), st.box(new))))
    four = pb.ax("4", iff_c)
    lemma = derive_by_taut(
        pb, st.imp(st.bbox(iff_c), st.bbox(st.iff(st.box(old),
                                                  st.box(new)))),
        (d, dd, four))
    return sc.mp(kid_fact, sc.admit(lemma))


def cf_to_e_implication(store: CircuitStore, proof: Proof
                        ) -> tuple[TransformReport, ExtensionEncoding]:
    """CF proof of a circuit phi to a CF proof of (definitional
    encoding of phi) -> (its output variable)."""
    assert_valid(store, proof)
    if proof.premises or proof.system != "CF":
        raise ProofError("expects a premise-free CF proof")
    st = store
    phi = proof.conclusion
    enc = extension_encoding(st, phi)
    qvar = dict(enc.var_map)
    conjuncts = []
    for s, q in enc.var_map:
        if st.is_var(s):
            body = s
        else:
            body = st.node(st.tag(s), [qvar[c] for c in st.children(s)])
        conjuncts.append(st.bbox(st.iff(q, body)))
    pb = ProofBuilder(st, "CF", proof.logic)
    sc = Scope(pb, [enc.e_circuit])

    def proj(k: int) -> int:
        if len(conjuncts) == 1:
            return refl_line(pb, enc.e_circuit)
        return conj_proj(pb, conjuncts, k)

    order = [s for s, _ in enc.var_map]
    dmemo: dict[int, int] = {}

    def defined(s: int) -> int:
        """Scope fact of bbox(q_s iff s)."""
        if s in dmemo:
            return dmemo[s]
        k = order.index(s)
        if st.is_var(s):
            fact = proj(k)
        else:
            kids = st.children(s)
            kid_facts = [defined(c) for c in kids]
            body = st.node(st.tag(s), [qvar[c] for c in kids])
            if st.tag(s) == "box":
                step = _bbox_box_cong_fact(sc, kid_facts[0],
                                           qvar[kids[0]], kids[0])
            else:
                step = _bbox_cong_fact(sc, st.tag(s), kid_facts,
                                       [qvar[c] for c in kids], list(kids))
            # step: bbox(body iff s); combine with the definition
            fact = _bbox_iff_fact(sc, proj(k), step, qvar[s], body, s)
        dmemo[s] = fact
        return fact

    top_fact = defined(phi)
    base = pb.copy_from(proof)
    lemma = derive_taut(
        pb, st.imp(st.and_(st.bbox(st.iff(qvar[phi], phi)), phi),
                   qvar[phi]),
        atoms=[qvar[phi], phi, st.box(st.iff(qvar[phi], phi))])
    final = sc.mp(sc.and_intro(top_fact, sc.admit(base)), sc.admit(lemma))
    pb.conclude(final)
    target = st.imp(enc.e_circuit, enc.output_var)
    return (_report(store, "cf_to_e", pb.build(),
                    metrics(store, proof)[0], target), enc)


def e_implication_to_cf(store: CircuitStore, proof: Proof, phi: int
                        ) -> TransformReport:
    """CF proof of encoding(phi) -> q_phi back to a CF proof of phi."""
    assert_valid(store, proof)
    st = store
    enc = extension_encoding(st, phi)
    if proof.conclusion != st.imp(enc.e_circuit, enc.output_var):
        raise ProofError("conclusion is not the encoded implication")
    sigma = {q: s for s, q in enc.var_map}
    inst = instantiate_proof(st, proof, sigma)
    pb = ProofBuilder(st, "CF", proof.logic)
    last = pb.copy_from(inst)
    # the substituted encoding is a conjunction of bbox(s iff s)
    parts = []
    for s, _ in enc.var_map:
        iff_line = derive_taut(pb, st.iff(s, s), atoms=[s])
        parts.append(bbox_intro(pb, iff_line))
    sc = Scope(pb, [])
    whole = sc.conj_intro(parts)
    assert pb.circuit(whole) == substitute(st, sigma, enc.e_circuit)
    final = pb.mp(whole, last)
    pb.conclude(final)
    return _report(store, "e_to_cf", pb.build(),
                   metrics(store, proof)[0], phi)


def cf_to_ef(store: CircuitStore, proof: Proof) -> TransformReport:
    """Simulate a premise-free CF proof in EF; the conclusion must be a
    small formula (its tree size is the output's lower bound)."""
    assert_valid(store, proof)
    if proof.premises or proof.system != "CF":
        raise ProofError("expects a premise-free CF proof")
    st = store
    universe: list[int] = []
    seen: set[int] = set()
    for circ, _ in proof.lines:
        for s in subcircuits(st, circ):
            if s not in seen:
                seen.add(s)
                universe.append(s)

    emap: dict[int, int] = {}
    counter = 0
    pb = ProofBuilder(st, "EF", proof.logic)
    def_line: dict[int, int] = {}
    for s in universe:
        if st.tag(s) in ("var", "top", "bot"):
            emap[s] = s
        else:
            emap[s] = st.var(f"{EXT_PREFIX}{counter}")
            counter += 1
            body = st.node(st.tag(s), [emap[c] for c in st.children(s)])
            def_line[s] = pb.ext(emap[s], body)

    iff_memo: dict[tuple[int, int], int] = {}

    def e_iff(a: int, b: int) -> int:
        """|- emap[a] iff emap[b] for circuits representing the same
        formula."""
        if a == b or emap[a] == emap[b]:
            return derive_taut(pb, st.iff(emap[a], emap[a]),
                               atoms=[emap[a]])
        if (a, b) in iff_memo:
            return iff_memo[a, b]
        kids_a, kids_b = st.children(a), st.children(b)
        prem = [def_line[a], def_line[b]]
        atoms = [emap[a], emap[b]]
        for ca, cb in zip(kids_a, kids_b):
            prem.append(e_iff(ca, cb))
            for x in (emap[ca], emap[cb]):
                if x not in atoms:
                    atoms.append(x)
        bodies = [st.node(st.tag(a), [emap[c] for c in kids_a]),
                  st.node(st.tag(b), [emap[c] for c in kids_b])]
        if st.tag(a) == "box":
            # box e_ca iff box e_cb needs modal reasoning
            ca, cb = kids_a[0], kids_b[0]
            base = prem[2]
            dir1 = box_mono(pb, derive_by_taut(
                pb, st.imp(emap[ca], emap[cb]), (base,)))
            dir2 = box_mono(pb, derive_by_taut(
                pb, st.imp(emap[cb], emap[ca]), (base,)))
            line = derive_by_taut(
                pb, st.iff(emap[a], emap[b]),
                (def_line[a], def_line[b], dir1, dir2))
        else:
            line = derive_by_taut(pb, st.iff(emap[a], emap[b]),
                                  tuple(prem))
        iff_memo[a, b] = line
        return line

    lines: list[int] = []
    for circ, just in proof.lines:
        kind = just[0]
        if kind == "ax":
            pattern = proof.logic.axiom(just[1]).pattern
            holes = schema_vars(st, pattern)
            inst_sigma = {h: emap[just[2][h]] for h in holes}
            ax_line = pb.axiom(just[1], inst_sigma)
            small = substitute(st, inst_sigma, pattern)
            eq = _spine_iff(pb, st, emap, def_line, pattern, just[2], circ)
            lines.append(derive_by_taut(pb, _ecirc(emap, circ),
                                        (ax_line, eq)))
        elif kind == "mp":
            imp_circ = proof.lines[just[2]][0]
            lines.append(derive_by_taut(
                pb, emap[circ],
                (lines[just[1]], lines[just[2]], def_line[imp_circ])))
        elif kind == "nec":
            base = lines[just[1]]
            boxed = pb.nec(base)
            lines.append(derive_by_taut(pb, emap[circ],
                                        (boxed, def_line[circ])))
        elif kind == "ceq":
            eq = e_iff(proof.lines[just[1]][0], circ)
            lines.append(derive_by_taut(pb, emap[circ],
                                        (lines[just[1]], eq)))
        else:
            raise ProofError(f"unsupported justification {kind}")

    # unfold the conclusion back to its literal formula
    unfold_memo: dict[int, int] = {}

    def unfold(s: int) -> int:
        """|- emap[s] iff s (as a formula)."""
        if s in unfold_memo:
            return unfold_memo[s]
        if emap[s] == s:
            line = derive_taut(pb, st.iff(s, s), atoms=[s])
        else:
            kids = st.children(s)
            kid_lines = [unfold(c) for c in kids]
            if st.tag(s) == "box":
                c = kids[0]
                dir1 = box_mono(pb, derive_by_taut(
                    pb, st.imp(emap[c], c), (kid_lines[0],)))
                dir2 = box_mono(pb, derive_by_taut(
                    pb, st.imp(c, emap[c]), (kid_lines[0],)))
                line = derive_by_taut(pb, st.iff(emap[s], s),
                                      (def_line[s], dir1, dir2))
            else:
                line = derive_by_taut(pb, st.iff(emap[s], s),
                                      (def_line[s],) + tuple(kid_lines))
        unfold_memo[s] = line
        return line

    final_eq = unfold(proof.conclusion)
    final = derive_by_taut(pb, proof.conclusion, (lines[-1], final_eq))
    pb.conclude(final)
    return _report(store, "cf_to_ef", pb.build(),
                   metrics(store, proof)[0], proof.conclusion)


def _ecirc(emap: dict[int, int], circ: int) -> int:
    return emap[circ]


def _spine_iff(pb: ProofBuilder, st: CircuitStore, emap, def_line,
               pattern: int, sigma: dict[int, int], inst: int) -> int:
    """|- emap[inst] iff pattern-applied-to-e-variables, following the
    pattern's spine."""
    target_small = substitute(
        st, {h: emap[v] for h, v in sigma.items()}, pattern)

    def go(pat: int, node: int) -> int:
        if st.is_var(pat) and st.var_name(pat).startswith(SCHEMA_PREFIX):
            return derive_taut(pb, st.iff(emap[node], emap[node]),
                               atoms=[emap[node]])
        small = substitute(st, {h: emap[v] for h, v in sigma.items()}, pat)
        kids_p = st.children(pat)
        kids_n = st.children(node)
        if not kids_p:
            return derive_taut(pb, st.iff(emap[node], small),
                               atoms=[emap[node]] if emap[node] == small
                               else [emap[node], small])
        kid_lines = [go(cp, cn) for cp, cn in zip(kids_p, kids_n)]
        if st.tag(pat) == "box":
            c_small = substitute(st, {h: emap[v] for h, v in sigma.items()},
                                 kids_p[0])
            dir1 = box_mono(pb, derive_by_taut(
                pb, st.imp(emap[kids_n[0]], c_small), (kid_lines[0],)))
            dir2 = box_mono(pb, derive_by_taut(
                pb, st.imp(c_small, emap[kids_n[0]]), (kid_lines[0],)))
            return derive_by_taut(pb, st.iff(emap[node], small),
                                  (def_line[node], dir1, dir2))
        return derive_by_taut(pb, st.iff(emap[node], small),
                              (def_line[node],) + tuple(kid_lines))

    return go(pattern, inst)


def ef_to_cf(store: CircuitStore, proof: Proof) -> TransformReport:
    """Eliminate extension axioms by substituting their definitions."""
    assert_valid(store, proof)
    if proof.system != "EF" or proof.premises:
        raise ProofError("expects a premise-free EF proof")
    st = store
    sigma: dict[int, int] = {}
    for circ, just in proof.lines:
        if just[0] == "ext":
            q, psi = just[1], just[2]
            sigma[q] = substitute(st, sigma, psi)
    pb = ProofBuilder(st, "CF", proof.logic)
    lines: list[int] = []
    for circ, just in proof.lines:
        kind = just[0]
        new_circ = substitute(st, sigma, circ)
        if kind == "ext":
            body = substitute(st, sigma, just[2])
            iff_line = derive_taut(pb, st.iff(body, body), atoms=[body])
            lines.append(iff_line)
        elif kind == "ax":
            lines.append(pb.axiom(just[1],
                                  {h: substitute(st, sigma, v)
                                   for h, v in just[2].items()}))
        elif kind == "mp":
            lines.append(pb.mp(lines[just[1]], lines[just[2]]))
        elif kind == "nec":
            lines.append(pb.nec(lines[just[1]]))
        else:
            raise ProofError(f"unsupported justification {kind}")
        assert pb.circuit(lines[-1]) == new_circ
    pb.conclude(lines[-1])
    return _report(store, "ef_to_cf", pb.build(),
                   metrics(store, proof)[0],
                   substitute(st, sigma, proof.conclusion))


def cf_ef_roundtrip(store: CircuitStore, direction: str, proof: Proof,
                    phi: int | None = None) -> TransformReport:
    """to-EF: CF proof of phi to an EF proof of encoding -> q_phi.
    to-CF: EF proof of encoding -> q_phi back to a CF proof of phi."""
    if direction == "to-EF":
        mid, enc = cf_to_e_implication(store, proof)
        rep = cf_to_ef(store, mid.output)
        return TransformReport("cf_ef_to_EF", rep.output, mid.input_size,
                               rep.output_size, rep.output_lines)
    if direction == "to-CF":
        assert phi is not None, "target circuit required"
        mid = ef_to_cf(store, proof)
        rep = e_implication_to_cf(store, mid.output, phi)
        return TransformReport("cf_ef_to_CF", rep.output,
                               metrics(store, proof)[0],
                               rep.output_size, rep.output_lines)
    raise ValueError(direction)


# -- substitution circuit proofs to substitution formula proofs -----------------

class _GlobalEnc:
    """Definitional q-variables shared across all lines of a proof."""

    def __init__(self, store: CircuitStore) -> None:
        self.store = store
        self.qvar: dict[int, int] = {}
        self.counter = 0

    def q(self, s: int) -> int:
        if s not in self.qvar:
            self.qvar[s] = self.store.var(f"q!{self.counter}")
            self.counter += 1
        return self.qvar[s]

    def definition(self, s: int) -> int:
        """bbox(q_s iff s*) with s* the one-level unfolding."""
        st = self.store
        if st.is_var(s):
            body = s
        else:
            body = st.node(st.tag(s), [self.q(c) for c in st.children(s)])
        return st.bbox(st.iff(self.q(s), body))

    def encoding_items(self, circ: int) -> list[int]:
        return [self.definition(s) for s in subcircuits(self.store, circ)]


def scf_to_sf(store: CircuitStore, proof: Proof) -> TransformReport:
    """Substitution circuit proof of phi to a substitution formula
    proof of encoding(phi) -> q_phi."""
    assert_valid(store, proof)
    if proof.system != "SCF":
        raise ProofError("expects an SCF proof")
    st = store
    enc = _GlobalEnc(st)
    # allocate q-variables deterministically, in line order
    for circ, _ in proof.lines:
        for s in subcircuits(st, circ):
            enc.q(s)

    pb = ProofBuilder(st, "SF", proof.logic)

    def e_items(circ: int) -> list[int]:
        return enc.encoding_items(circ)

    def spine_fact(sc: Scope, items: list[int], pattern: int,
                   sigma: dict[int, int], inst: int) -> int:
        """Scope fact of bbox(q_inst iff pattern[q_(sigma h)]),
        unwinding the top of the circuit along the pattern."""
        if st.is_var(pattern) and \
                st.var_name(pattern).startswith(SCHEMA_PREFIX):
            q = enc.q(inst)
            base = derive_taut(pb, st.iff(q, q), atoms=[q])
            return sc.admit(bbox_intro(pb, base))
        small = substitute(st, {h: enc.q(v) for h, v in sigma.items()},
                           pattern)
        kids_p = st.children(pattern)
        kids_n = st.children(inst)
        kq = [enc.q(c) for c in kids_n]
        d = enc.definition(inst)
        f_def = _proj_item(sc, items, d)
        if not kids_p:
            return f_def
        kid_facts = [spine_fact(sc, items, cp, sigma, cn)
                     for cp, cn in zip(kids_p, kids_n)]
        if st.tag(pattern) == "box":
            inner_small = substitute(
                st, {h: enc.q(v) for h, v in sigma.items()}, kids_p[0])
            step = _bbox_box_cong_fact(sc, kid_facts[0], kq[0], inner_small)
        else:
            smalls = [substitute(st, {h: enc.q(v)
                                      for h, v in sigma.items()}, cp)
                      for cp in kids_p]
            step = _bbox_cong_fact(sc, st.tag(pattern), kid_facts,
                                   kq, smalls)
        return _bbox_iff_fact(sc, f_def,
                              step, enc.q(inst),
                              st.node(st.tag(pattern), kq), small)

    def _proj_item(sc: Scope, items: list[int], item: int) -> int:
        k = items.index(item)
        if len(items) == 1:
            return refl_line(pb, items[0])
        return conj_proj(pb, items, k)

    fact_lines: list[int] = []
    for idx, (circ, just) in enumerate(proof.lines):
        kind = just[0]
        items_i = e_items(circ)
        e_i = st.conj(items_i)
        target = st.imp(e_i, st.bbox(enc.q(circ)))
        if kind == "ax":
            sc = Scope(pb, [e_i])
            pattern = proof.logic.axiom(just[1]).pattern
            holes = schema_vars(st, pattern)
            inst_line = pb.axiom(just[1],
                                 {h: enc.q(just[2][h]) for h in holes})
            small = substitute(st, {h: enc.q(just[2][h]) for h in holes},
                               pattern)
            sp = spine_fact(sc, items_i, pattern, just[2], circ)
            got = sc.admit(bbox_intro(pb, inst_line))
            q = enc.q(circ)
            m1 = box_mono(pb, derive_taut(
                pb, st.imp(st.iff(q, small), st.imp(small, q)),
                atoms=[q, small]))
            lemma = derive_by_taut(
                pb, st.imp(st.and_(st.bbox(st.iff(q, small)),
                                   st.bbox(small)), st.bbox(q)),
                (m1, pb.ax("k", small, q)))
            fact = sc.mp(sc.and_intro(sp, got), sc.admit(lemma))
            fact_lines.append(_close_fact(pb, sc, fact, target))
        elif kind == "mp":
            j_ante, j_imp = just[1], just[2]
            circ_a = proof.lines[j_ante][0]
            circ_imp = proof.lines[j_imp][0]
            items_all = _merge_items(items_i, e_items(circ_a),
                                     e_items(circ_imp))
            h = st.conj(items_all)
            sc = Scope(pb, [h])
            f_a = _chain_into(pb, sc, items_all, e_items(circ_a),
                              fact_lines[j_ante])
            f_imp = _chain_into(pb, sc, items_all, e_items(circ_imp),
                                fact_lines[j_imp])
            # unwind the implication's top connective
            qa, qi, qc = enc.q(circ_a), enc.q(circ_imp), enc.q(circ)
            d = enc.definition(circ_imp)
            f_def = _proj_in(pb, sc, items_all, d)
            lemma = derive_by_taut(
                pb,
                st.imp(st.conj([st.bbox(st.iff(qi, st.imp(qa, qc))),
                                st.bbox(qi), st.bbox(qa)]),
                       st.bbox(qc)),
                (pb.ax("k", st.iff(qi, st.imp(qa, qc)), _i1(st, qi, qa, qc)),
                 pb.ax("k", qi, st.imp(qa, qc)),
                 pb.ax("k", qa, qc),
                 pb.nec(derive_taut(pb, _i2(st, qi, qa, qc),
                                    atoms=[qi, qa, qc]))))
            whole = sc.conj_intro([f_def, f_imp, f_a])
            fact = sc.mp(whole, sc.admit(lemma))
            fact_lines.append(_discharge_extras(
                pb, sc, fact, items_all, items_i, enc, target))
        elif kind == "nec":
            j = just[1]
            circ_j = proof.lines[j][0]
            items_all = _merge_items(items_i, e_items(circ_j))
            h = st.conj(items_all)
            sc = Scope(pb, [h])
            f_j = _chain_into(pb, sc, items_all, e_items(circ_j),
                              fact_lines[j])
            qj, qc = enc.q(circ_j), enc.q(circ)
            d = enc.definition(circ)      # bbox(qc iff box qj)
            f_def = _proj_in(pb, sc, items_all, d)
            lemma = derive_by_taut(
                pb,
                st.imp(st.conj([st.bbox(st.iff(qc, st.box(qj))),
                                st.bbox(qj)]),
                       st.bbox(qc)),
                (pb.ax("4", qj),
                 pb.ax("k", st.iff(qc, st.box(qj)),
                       st.imp(st.box(qj), qc)),
                 pb.nec(derive_taut(
                     pb, st.imp(st.iff(qc, st.box(qj)),
                                st.imp(st.box(qj), qc)),
                     atoms=[qc, st.box(qj)])),
                 pb.ax("k", st.box(qj), qc)))
            whole = sc.conj_intro([f_def, f_j])
            fact = sc.mp(whole, sc.admit(lemma))
            fact_lines.append(_discharge_extras(
                pb, sc, fact, items_all, items_i, enc, target))
        elif kind == "subst":
            j, tau = just[1], just[2]
            circ_j = proof.lines[j][0]
            rho: dict[int, int] = {}
            for s in subcircuits(st, circ_j):
                if st.is_var(s):
                    rho[s] = enc.q(substitute(st, tau, s))
                rho[enc.q(s)] = enc.q(substitute(st, tau, s))
            moved = pb.subst(fact_lines[j], rho)
            moved_items = [substitute(st, rho, it)
                           for it in e_items(circ_j)]
            provided = {}
            for it in moved_items:
                if it not in items_i:
                    # variable definitions renamed to bbox(x iff x)
                    iff_node = st.children(it)[0]
                    x = st.children(st.children(iff_node)[0])[0]
                    assert iff_node == st.iff(x, x), "unexpected leftover"
                    base = derive_taut(pb, iff_node, atoms=[x])
                    provided[it] = bbox_intro(pb, base)
            line = restrict_antecedent(pb, moved, moved_items, items_i,
                                       provided)
            fact_lines.append(line)
        elif kind == "ceq":
            j = just[1]
            circ_j = proof.lines[j][0]
            items_all = _merge_items(items_i, e_items(circ_j))
            h = st.conj(items_all)
            sc = Scope(pb, [h])
            f_j = _chain_into(pb, sc, items_all, e_items(circ_j),
                              fact_lines[j])
            pair_memo: dict[tuple[int, int], int] = {}

            def pair_fact(a: int, b: int) -> int:
                """Scope fact of bbox(q_a iff q_b) for same-formula a, b."""
                if (a, b) in pair_memo:
                    return pair_memo[a, b]
                if a == b:
                    qa = enc.q(a)
                    base = derive_taut(pb, st.iff(qa, qa), atoms=[qa])
                    out = sc.admit(bbox_intro(pb, base))
                else:
                    ka, kb = st.children(a), st.children(b)
                    kid = [pair_fact(x, y) for x, y in zip(ka, kb)]
                    da = _proj_in(pb, sc, items_all, enc.definition(a))
                    db = _proj_in(pb, sc, items_all, enc.definition(b))
                    if st.tag(a) == "box":
                        mid = _bbox_box_cong_fact(sc, kid[0],
                                                  enc.q(ka[0]), enc.q(kb[0]))
                    else:
                        mid = _bbox_cong_fact(
                            sc, st.tag(a), kid,
                            [enc.q(x) for x in ka], [enc.q(y) for y in kb])
                    s1 = _bbox_iff_fact(
                        sc, da, mid, enc.q(a),
                        st.node(st.tag(a), [enc.q(x) for x in ka]),
                        st.node(st.tag(b), [enc.q(y) for y in kb]))
                    qb_def = st.node(st.tag(b), [enc.q(y) for y in kb])
                    db_sym = _bbox_iff_sym(sc, db, enc.q(b), qb_def)
                    out = _bbox_iff_fact(sc, s1, db_sym, enc.q(a),
                                         qb_def, enc.q(b))
                pair_memo[a, b] = out
                return out

            eq = pair_fact(circ, circ_j)
            qc, qj = enc.q(circ), enc.q(circ_j)
            m1 = box_mono(pb, derive_taut(
                pb, st.imp(st.iff(qc, qj), st.imp(qj, qc)),
                atoms=[qc, qj]))
            lemma = derive_by_taut(
                pb, st.imp(st.and_(st.bbox(st.iff(qc, qj)), st.bbox(qj)),
                           st.bbox(qc)),
                (m1, pb.ax("k", qj, qc)))
            fact = sc.mp(sc.and_intro(eq, f_j), sc.admit(lemma))
            fact_lines.append(_discharge_extras(
                pb, sc, fact, items_all, items_i, enc, target))
        else:
            raise ProofError(f"unsupported justification {kind}")
        assert pb.circuit(fact_lines[-1]) == target, kind

    # final: E_phi -> q_phi
    circ = proof.conclusion
    e_phi = st.conj(e_items(circ))
    q_phi = enc.q(circ)
    peel = derive_taut(pb, st.imp(st.bbox(q_phi), q_phi),
                       atoms=[q_phi, st.box(q_phi)])
    final = chain_line(pb, fact_lines[-1], peel)
    pb.conclude(final)
    target = st.imp(e_phi, q_phi)
    return _report(store, "scf_to_sf", pb.build(),
                   metrics(store, proof)[0], target)


def _i1(st: CircuitStore, qi: int, qa: int, qc: int) -> int:
    return st.imp(qi, st.imp(qa, qc))


def _i2(st: CircuitStore, qi: int, qa: int, qc: int) -> int:
    return st.imp(st.iff(qi, st.imp(qa, qc)), st.imp(qi, st.imp(qa, qc)))


def _merge_items(*lists: list[int]) -> list[int]:
    out: list[int] = []
    for lst in lists:
        for it in lst:
            if it not in out:
                out.append(it)
    return out


def _proj_in(pb: ProofBuilder, sc: Scope, items: list[int],
             item: int) -> int:
    k = items.index(item)
    if len(items) == 1:
        return refl_line(pb, items[0])
    return conj_proj(pb, items, k)


def _chain_into(pb: ProofBuilder, sc: Scope, big_items: list[int],
                small_items: list[int], line: int) -> int:
    """Import |- conj(small) -> x as a fact of the conj(big) scope."""
    st = pb.store
    if big_items == small_items:
        return line
    parts = [_proj_in(pb, sc, big_items, it) for it in small_items]
    whole = sc.conj_intro(parts) if parts else sc.admit(pb.ax("top"))
    return sc.mp(whole, sc.admit(line))


def _close_fact(pb: ProofBuilder, sc: Scope, fact: int, target: int) -> int:
    assert pb.circuit(fact) == target
    return fact


def _discharge_extras(pb: ProofBuilder, sc: Scope, fact: int,
                      items_all: list[int], items_keep: list[int],
                      enc: "_GlobalEnc", target: int) -> int:
    """Turn a fact over the merged encoding into one over the line's own
    encoding by substituting away foreign q-variables, top-down."""
    st = pb.store
    if items_all == items_keep:
        assert pb.circuit(fact) == target
        return fact
    extras = [it for it in items_all if it not in items_keep]
    # circuits defined by the extra conjuncts, parents before children
    extra_circuits = []
    for s, q in sorted(((s, q) for s, q in enc.qvar.items()
                        if enc.definition(s) in extras),
                       key=lambda t: -dag_size(st, t[0])):
        extra_circuits.append(s)
    line = fact
    current_items = list(items_all)
    for s in extra_circuits:
        d = enc.definition(s)
        if st.is_var(s):
            body = s
        else:
            body = st.node(st.tag(s), [enc.q(c) for c in st.children(s)])
        rho = {enc.q(s): body}
        line = pb.subst(line, rho)
        current_items = [substitute(st, rho, it) for it in current_items]
        triv = st.bbox(st.iff(body, body))
        base = derive_taut(pb, st.iff(body, body), atoms=[body])
        keep = [it for it in current_items if it != triv]
        line = restrict_antecedent(pb, line, current_items, keep,
                                   {triv: bbox_intro(pb, base)})
        current_items = keep
    assert current_items == items_keep, "discharge left mismatched conjuncts"
    assert pb.circuit(line) == target
    return line


def _bbox_iff_sym(sc: Scope, fact: int, a: int, b: int) -> int:
    """Fact of bbox(a iff b) to the fact of bbox(b iff a)."""
    pb = sc.pb
    st = pb.store
    bare = derive_taut(pb, st.imp(st.iff(a, b), st.iff(b, a)),
                       atoms=[a, b])
    mono = box_mono(pb, bare)
    lemma = derive_by_taut(
        pb, st.imp(st.bbox(st.iff(a, b)), st.bbox(st.iff(b, a))),
        (bare, mono))
    return sc.mp(fact, sc.admit(lemma))


# -- embedding intuitionistic proofs into reflexive modal logics ----------------

from .circuits import gmt_translate
from .logics import bounded_branching_axiom


def t_box_line(pb: ProofBuilder, phi: int) -> int:
    """|- T(phi) iff box T(phi) for an intuitionistic circuit phi
    (reflexive transitive logics)."""
    st = pb.store
    t = gmt_translate(st, phi)
    target = st.iff(t, st.box(t))
    known = pb.have(target)
    if known is not None:
        return known
    memo: dict[int, int] = {}

    def build(node: int) -> int:
        if node in memo:
            return memo[node]
        tn = gmt_translate(st, node)
        goal = st.iff(tn, st.box(tn))
        tag = st.tag(node)
        if tag in ("var", "imp"):
            # T(node) is a box: box X iff box box X by 4 and t
            inner = st.children(tn)[0]
            line = derive_by_taut(pb, goal,
                                  (pb.ax("4", inner), pb.ax("t", tn)))
        elif tag == "bot":
            line = derive_by_taut(pb, goal,
                                  (pb.ax("efq", st.box(st.bot())),
                                   pb.ax("t", st.bot())))
        elif tag == "and":
            a, b = st.children(node)
            fa, fb = build(a), build(b)
            ta, tb = gmt_translate(st, a), gmt_translate(st, b)
            bc = box_conj(pb, ta, tb)
            line = derive_by_taut(pb, goal,
                                  (fa, fb, bc, pb.ax("t", tn)))
        else:
            a, b = st.children(node)
            fa, fb = build(a), build(b)
            ta, tb = gmt_translate(st, a), gmt_translate(st, b)
            ja = box_mono(pb, pb.ax("a6", ta, tb))
            jb = box_mono(pb, pb.ax("a7", ta, tb))
            line = derive_by_taut(pb, goal,
                                  (fa, fb, ja, jb, pb.ax("t", tn)))
        memo[node] = line
        return line

    return build(phi)


class _GmtScope:
    """Natural-deduction facts for translated sequents: a fact of c
    under hypotheses hs is a line of conj(T(hs)) -> T(c)."""

    def __init__(self, pb: ProofBuilder, hyps_t: list[int]) -> None:
        self.pb = pb
        self.st = pb.store
        self.sc = Scope(pb, [pb.store.conj(hyps_t)] if hyps_t else [])
        self.hyps_t = hyps_t

    def hyp(self, k: int) -> int:
        if len(self.hyps_t) == 1:
            return refl_line(self.pb, self.hyps_t[0])
        return conj_proj(self.pb, self.hyps_t, k)

    def admit(self, line: int) -> int:
        return self.sc.admit(line)

    def mp_t(self, f_a: int, f_imp: int) -> int:
        """Facts of T(a) and T(a -> b) = box(Ta -> Tb) give T(b)."""
        st = self.st
        body = self.sc.body(f_imp)
        assert st.tag(body) == "box"
        inner = st.children(body)[0]
        unboxed = self.sc.mp(f_imp, self.sc.admit(
            self.pb.ax("t", inner)))
        return self.sc.mp(f_a, unboxed)

    def intro(self, sub: "_GmtScope", fact: int) -> int:
        """Discharge the innermost hypothesis: the sub-scope fact of
        T(b) becomes this scope's fact of T(a -> b) = box(Ta -> Tb).

        The boxing step needs every hypothesis to persist through one
        box, which holds because translated circuits are box-headed up
        to provable equivalence."""
        pb = self.pb
        st = self.st
        ta = sub.hyps_t[-1]
        assert sub.hyps_t[:-1] == self.hyps_t
        tb = sub.sc.body(fact)
        target_inner = st.imp(ta, tb)
        if not self.hyps_t:
            return pb.nec(fact)
        inner = self.sc.curry(fact, ta)   # fact of (Ta -> Tb) here
        g = st.conj(self.hyps_t)
        boxed = pb.mp(pb.nec(inner), pb.ax("k", g, target_inner))
        persists = tuple(_tbox_for(pb, h) for h in self.hyps_t)
        inner_conj = box_conj_list(pb, list(self.hyps_t))
        return derive_by_taut(pb, st.imp(g, st.box(target_inner)),
                              persists + (inner_conj, boxed))

    def sub(self, t_hyp: int) -> "_GmtScope":
        return _GmtScope(self.pb, self.hyps_t + [t_hyp])


_TBOX_CACHE: dict[int, dict[int, int]] = {}


def _tbox_for(pb: ProofBuilder, t_circ: int) -> int:
    """|- T(x) -> box T(x) given t_circ = T(x); derived from the shape
    of translated circuits (box-headed, bot, or and/or of such)."""
    st = pb.store
    target = st.imp(t_circ, st.box(t_circ))
    known = pb.have(target)
    if known is not None:
        return known
    tag = st.tag(t_circ)
    if tag == "box":
        inner = st.children(t_circ)[0]
        return derive_by_taut(pb, target, (pb.ax("4", inner),))
    if tag == "bot":
        return pb.ax("efq", st.box(st.bot()))
    a, b = st.children(t_circ)
    fa, fb = _tbox_for(pb, a), _tbox_for(pb, b)
    if tag == "and":
        bc = box_conj(pb, a, b)
        return derive_by_taut(pb, target, (fa, fb, bc))
    if tag == "or":
        ja = box_mono(pb, pb.ax("a6", a, b))
        jb = box_mono(pb, pb.ax("a7", a, b))
        return derive_by_taut(pb, target, (fa, fb, ja, jb))
    raise ProofError("not a translated circuit")


def _gmt_axiom(pb: ProofBuilder, schema_id: str, args_t: list[int]) -> int:
    """|- T(axiom instance), scripted per schema over the translated
    argument circuits."""
    st = pb.store

    def imp_t(x: int, y: int) -> int:
        return st.box(st.imp(x, y))

    root = _GmtScope(pb, [])
    if schema_id == "a1":
        a, b = args_t
        s1 = root.sub(a)
        s2 = s1.sub(b)
        f = s2.hyp(0)
        return root.intro(s1, s1.intro(s2, f))
    if schema_id == "a2":
        a, b, c = args_t
        s1 = root.sub(imp_t(a, imp_t(b, c)))
        s2 = s1.sub(imp_t(a, b))
        s3 = s2.sub(a)
        f_ab = s3.hyp(1)
        f_abc = s3.hyp(0)
        f_a = s3.hyp(2)
        f_b = s3.mp_t(f_a, f_ab)
        f_bc = s3.mp_t(f_a, f_abc)
        f_c = s3.mp_t(f_b, f_bc)
        return root.intro(s1, s1.intro(s2, s2.intro(s3, f_c)))
    if schema_id == "a3" or schema_id == "a4":
        a, b = args_t
        s1 = root.sub(st.and_(a, b))
        f = s1.sc.and_elim(s1.hyp(0), 0 if schema_id == "a3" else 1)
        return root.intro(s1, f)
    if schema_id == "a5":
        a, b = args_t
        s1 = root.sub(a)
        s2 = s1.sub(b)
        f = s2.sc.and_intro(s2.hyp(0), s2.hyp(1))
        return root.intro(s1, s1.intro(s2, f))
    if schema_id in ("a6", "a7"):
        a, b = args_t
        which = 0 if schema_id == "a6" else 1
        s1 = root.sub(args_t[which])
        f = s1.sc.or_intro(s1.hyp(0), [a, b], which)
        return root.intro(s1, f)
    if schema_id == "a8":
        a, b, c = args_t
        s1 = root.sub(imp_t(a, c))
        s2 = s1.sub(imp_t(b, c))
        s3 = s2.sub(st.or_(a, b))

        def branch(sub_sc: Scope, k: int) -> int:
            lifted = s3.sc.lift([s3.hyp(0), s3.hyp(1)][k],
                                [a, b][k])
            unboxed = sub_sc.mp(lifted, sub_sc.admit(
                pb.ax("t", st.imp([a, b][k], c))))
            return sub_sc.mp(sub_sc.hyp(len(sub_sc.hyps) - 1), unboxed)

        f = s3.sc.by_disj(s3.hyp(2), [a, b], branch)
        return root.intro(s1, s1.intro(s2, s2.intro(s3, f)))
    if schema_id == "efq":
        (a,) = args_t
        s1 = root.sub(st.bot())
        f = s1.sc.mp(s1.hyp(0), s1.sc.admit(pb.ax("efq", a)))
        return root.intro(s1, f)
    raise ProofError(f"no translation script for axiom {schema_id}")


def _gmt_tk_axiom(pb: ProofBuilder, k: int, args_t: list[int]) -> int:
    """|- T(tree-branching axiom instance) over a logic carrying the
    bounded-branching schema, via that schema on the translated args."""
    st = pb.store
    drops_t = [st.disj([args_t[j] for j in range(k + 1) if j != i])
               for i in range(k + 1)]
    big_t = st.disj([st.box(st.imp(args_t[i], drops_t[i]))
                     for i in range(k + 1)])
    whole_t = st.disj(args_t)
    antecedent = st.box(st.imp(big_t, whole_t))

    # inner goal: antecedent -> whole_t, via the bounded branching axiom
    bb = pb.ax(f"bb{k}", *args_t)
    sc = Scope(pb, [antecedent])
    # antecedent implies the bb antecedent (replace T a by bbox T a)
    conv = _bb_antecedent_bridge(pb, k, args_t, drops_t, big_t, whole_t)
    f_ante = sc.mp(sc.hyp(0), sc.admit(conv))
    f_cons = sc.mp(f_ante, sc.admit(bb))
    # each disjunct box(drop of bboxes) implies whole_t
    finishers = []
    bb_drops = [st.disj([st.bbox(args_t[j]) for j in range(k + 1)
                         if j != i]) for i in range(k + 1)]
    for i in range(k + 1):
        strip = derive_by_taut(
            pb, st.imp(bb_drops[i], whole_t),
            tuple(derive_by_taut(
                pb, st.imp(st.bbox(args_t[j]), args_t[j]), ())
                for j in range(k + 1) if j != i) +
            tuple(disj_inj(pb, args_t, j)
                  for j in range(k + 1) if j != i))
        finishers.append(derive_by_taut(
            pb, st.imp(st.box(bb_drops[i]), whole_t),
            (pb.ax("t", bb_drops[i]), strip)))
    assemble = derive_by_taut(
        pb, st.imp(st.disj([st.box(d) for d in bb_drops]), whole_t),
        tuple(finishers))
    f_whole = sc.mp(f_cons, sc.admit(assemble))
    return pb.nec(f_whole)                   # box(antecedent -> whole_t)


def _bb_antecedent_bridge(pb: ProofBuilder, k: int, args_t, drops_t,
                          big_t, whole_t) -> int:
    """|- box(big_t -> whole_t) -> (bounded-branching antecedent on the
    translated args), rewriting T a into bbox T a inside."""
    st = pb.store
    bb_drops = [st.disj([st.bbox(args_t[j]) for j in range(k + 1)
                         if j != i]) for i in range(k + 1)]
    bb_big = st.disj([st.box(st.imp(st.bbox(args_t[i]), bb_drops[i]))
                      for i in range(k + 1)])
    bb_whole = st.disj([st.bbox(a) for a in args_t])
    inner_old = st.imp(big_t, whole_t)
    inner_new = st.imp(bb_big, bb_whole)
    # bare implication between the two inner shapes
    prem = []
    for i in range(k + 1):
        # box(bbox a_i -> bb_drop_i) -> box(a_i -> drop_i) and back
        old_imp = st.imp(args_t[i], drops_t[i])
        new_imp = st.imp(st.bbox(args_t[i]), bb_drops[i])
        fwd = derive_by_taut(
            pb, st.imp(new_imp, old_imp),
            tuple(_tbox_for(pb, args_t[j]) for j in range(k + 1)))
        back = derive_by_taut(
            pb, st.imp(old_imp, new_imp),
            tuple(_tbox_for(pb, args_t[j]) for j in range(k + 1)))
        prem.append(box_mono(pb, fwd))
        prem.append(box_mono(pb, back))
    bridge_back = derive_by_taut(
        pb, st.imp(inner_old, inner_new),
        tuple(prem) + tuple(_tbox_for(pb, a) for a in args_t))
    return box_mono(pb, bridge_back)


def gmt_lift(store: CircuitStore, proof: Proof,
             companion: LogicSpec) -> TransformReport:
    """Translate an intuitionistic (S)CF proof into the given reflexive
    modal companion, line by line."""
    assert_valid(store, proof)
    if proof.premises:
        raise ProofError("embedding takes premise-free proofs")
    st = store
    if not companion.has_axiom("t"):
        raise ProofError("the companion must be reflexive (S4-based)")
    if proof.logic.branching is not None and \
            companion.branching != proof.logic.branching:
        raise ProofError("companion branching bound mismatch")
    system = "CF" if proof.system in ("F", "CF") else "SCF"
    pb = ProofBuilder(st, system, companion)
    lines: list[int] = []
    for circ, just in proof.lines:
        kind = just[0]
        t_circ = gmt_translate(st, circ)
        if kind == "ax":
            schema_id = just[1]
            pattern = proof.logic.axiom(schema_id).pattern
            holes = schema_vars(st, pattern)
            args_t = [gmt_translate(st, just[2][h]) for h in holes]
            if schema_id.startswith("tk"):
                line = _gmt_tk_axiom(pb, proof.logic.branching, args_t)
            else:
                line = _gmt_axiom(pb, schema_id, args_t)
            # scripted translation follows the axiom's shape literally
            assert pb.circuit(line) == _pattern_t(st, pattern, just[2]), \
                schema_id
            assert pb.circuit(line) == t_circ
        elif kind == "mp":
            imp_line = lines[just[2]]
            inner = st.children(pb.circuit(imp_line))[0]
            unboxed = pb.mp(imp_line, pb.ax("t", inner))
            line = pb.mp(lines[just[1]], unboxed)
        elif kind == "subst":
            tau = just[2]
            rho = {p: gmt_translate(st, v) for p, v in tau.items()}
            moved = pb.subst(lines[just[1]], rho)
            line = _gmt_subst_patch(pb, pb.circuit(moved), t_circ, moved,
                                    rho)
        elif kind == "ceq":
            line = pb.ceq(lines[just[1]], t_circ)
        else:
            raise ProofError(f"unsupported justification {kind}")
        assert pb.circuit(line) == t_circ
        lines.append(line)
    pb.conclude(lines[-1])
    return _report(store, "gmt", pb.build(), metrics(store, proof)[0],
                   gmt_translate(st, proof.conclusion))


def _pattern_t(st: CircuitStore, pattern: int, sigma: dict[int, int]) -> int:
    return gmt_translate(st, substitute(st, sigma, pattern))


def _gmt_subst_patch(pb: ProofBuilder, got: int, want: int, line: int,
                     rho: dict[int, int]) -> int:
    """After substituting T-images for variables, patch box T(x) back to
    T(x) wherever the original translation placed a variable."""
    st = pb.store
    if got == want:
        return line
    # replace box(T(v)) by T(v), one substituted variable at a time
    current = line
    cur_circ = got
    for p, tv in sorted(rho.items(), key=lambda kv: st.var_name(kv[0])):
        boxed = st.box(tv)
        if boxed == tv:
            continue
        hole = fresh_hole(st, [cur_circ, want])
        pattern = replace_pattern(st, cur_circ, boxed, hole)
        desired = substitute(st, {hole: tv}, pattern)
        if desired == cur_circ:
            continue
        tb = t_box_from_circ(pb, tv)
        eq = subst_eq_line(pb, boxed, tv, pattern, hole)
        sym = derive_by_taut(pb, st.iff(boxed, tv), (tb,))
        bb_eq = derive_by_taut(pb, st.bbox(st.iff(boxed, tv)),
                               (sym, pb.nec(sym)))
        applied = pb.mp(bb_eq, eq)
        current = derive_by_taut(pb, desired, (current, applied))
        cur_circ = desired
    assert cur_circ == want, "substitution patch failed"
    return current


def t_box_from_circ(pb: ProofBuilder, t_circ: int) -> int:
    """|- T(x) iff box T(x) for a circuit already in translated form."""
    st = pb.store
    fwd = _tbox_for(pb, t_circ)
    return derive_by_taut(pb, st.iff(t_circ, st.box(t_circ)),
                          (fwd, pb.ax("t", t_circ)))
