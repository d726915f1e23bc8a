"""Proof scripting: hypothesis scopes, deduction-theorem compilation,
a complete classical tautology prover, and modal combinators.

Everything here emits lines into a ProofBuilder and returns line
indices, so generated proofs are ordinary checkable objects.  A fact of
c in a ``Scope`` with hypotheses [h1..hn] is a premise-free line of
(h1 & ... & hn) -> c (left-associated); modus ponens under hypotheses
is then a single a2 instance, and discharging one hypothesis is a
constant-size currying script.

The scope machinery uses only the positive axioms and is
intuitionistically sound; classical shortcuts (truth tables, excluded
middle) are confined to ``derive_taut`` and friends, which require
Peirce's law in the ambient logic.
"""

from __future__ import annotations

from .circuits import CircuitStore
from .logics import LogicSpec
from .proofs import Proof, ProofBuilder

BOOL_TAGS = frozenset({"and", "or", "imp", "not", "top", "bot"})


# -- premise-free implication combinators ------------------------------------

def refl_line(pb: ProofBuilder, a: int) -> int:
    """|- a -> a."""
    st = pb.store
    aa = st.imp(a, a)
    known = pb.have(aa)
    if known is not None:
        return known
    i1 = pb.ax("a2", a, aa, a)
    i2 = pb.ax("a1", a, aa)
    i3 = pb.mp(i2, i1)
    i4 = pb.ax("a1", a, a)
    return pb.mp(i4, i3)


def weaken_line(pb: ProofBuilder, a: int, line: int) -> int:
    """From |- x give |- a -> x."""
    x = pb.circuit(line)
    return pb.mp(line, pb.ax("a1", x, a))


def chain_line(pb: ProofBuilder, i_xy: int, i_yz: int) -> int:
    """From |- x -> y and |- y -> z give |- x -> z."""
    st = pb.store
    nxy = st.nodes[pb.circuit(i_xy)]
    nyz = st.nodes[pb.circuit(i_yz)]
    assert nxy[0] == "imp" and nyz[0] == "imp" and nxy[2] == nyz[1], "chain"
    x, y, z = nxy[1], nxy[2], nyz[2]
    target = st.imp(x, z)
    known = pb.have(target)
    if known is not None:
        return known
    w = weaken_line(pb, x, i_yz)             # x -> (y -> z)
    half = pb.mp(w, pb.ax("a2", x, y, z))    # (x -> y) -> (x -> z)
    return pb.mp(i_xy, half)


def under_imp(pb: ProofBuilder, a: int, line: int) -> int:
    """From |- x -> y give |- (a -> x) -> (a -> y)."""
    st = pb.store
    node = st.nodes[pb.circuit(line)]
    assert node[0] == "imp"
    x, y = node[1], node[2]
    w = weaken_line(pb, a, line)             # a -> (x -> y)
    return pb.mp(w, pb.ax("a2", a, x, y))


def conj_proj(pb: ProofBuilder, items: list[int], k: int) -> int:
    """|- conj(items) -> items[k] for a left-associated conjunction."""
    st = pb.store
    m = len(items)
    assert 0 <= k < m
    whole = st.conj(items)
    target = st.imp(whole, items[k])
    known = pb.have(target)
    if known is not None:
        return known
    if m == 1:
        return refl_line(pb, whole)
    prefixes = [items[0]]
    for x in items[1:]:
        prefixes.append(st.and_(prefixes[-1], x))
    if k == m - 1:
        return pb.ax("a4", prefixes[m - 2], items[k])
    line = pb.ax("a3", prefixes[m - 2], items[m - 1])
    for j in range(m - 2, k, -1):
        line = chain_line(pb, line, pb.ax("a3", prefixes[j - 1], items[j]))
    if k > 0:
        line = chain_line(pb, line, pb.ax("a4", prefixes[k - 1], items[k]))
    return line


def disj_inj(pb: ProofBuilder, items: list[int], k: int) -> int:
    """|- items[k] -> disj(items) for a left-associated disjunction."""
    st = pb.store
    m = len(items)
    assert 0 <= k < m
    target = st.imp(items[k], st.disj(items))
    known = pb.have(target)
    if known is not None:
        return known
    prefixes = [items[0]]
    for x in items[1:]:
        prefixes.append(st.or_(prefixes[-1], x))
    if m == 1:
        return refl_line(pb, items[0])
    if k == 0:
        line = refl_line(pb, items[0])
        nxt = 1
    else:
        line = pb.ax("a7", prefixes[k - 1], items[k])
        nxt = k + 1
    for j in range(nxt, m):
        line = chain_line(pb, line, pb.ax("a6", prefixes[j - 1], items[j]))
    return line


def disj_elim(pb: ProofBuilder, items: list[int],
              branch_lines: list[int], target: int) -> int:
    """From |- items[i] -> target for each i give |- disj(items) -> target."""
    st = pb.store
    assert len(items) == len(branch_lines) >= 1
    line = branch_lines[0]
    acc = items[0]
    for x, br in zip(items[1:], branch_lines[1:]):
        a8 = pb.ax("a8", acc, x, target)
        line = pb.mp(br, pb.mp(line, a8))
        acc = st.or_(acc, x)
    return line


class Scope:
    """Derivations under a hypothesis list, facts pre-discharged as
    implications from the hypothesis conjunction."""

    def __init__(self, pb: ProofBuilder, hyps: list[int]) -> None:
        self.pb = pb
        self.st = pb.store
        self.hyps = list(hyps)
        self.conj = self.st.conj(self.hyps) if self.hyps else None

    def close(self, c: int) -> int:
        return c if self.conj is None else self.st.imp(self.conj, c)

    def body(self, fact: int) -> int:
        c = self.pb.circuit(fact)
        if self.conj is None:
            return c
        node = self.st.nodes[c]
        assert node[0] == "imp" and node[1] == self.conj, "fact of another scope"
        return node[2]

    def admit(self, line: int) -> int:
        if self.conj is None:
            return line
        return weaken_line(self.pb, self.conj, line)

    def ax(self, schema_id: str, *args: int) -> int:
        return self.admit(self.pb.ax(schema_id, *args))

    def hyp(self, k: int) -> int:
        assert self.hyps, "no hypotheses"
        return conj_proj(self.pb, self.hyps, k)

    def mp(self, f_p: int, f_imp: int) -> int:
        node = self.st.nodes[self.body(f_imp)]
        assert node[0] == "imp", "scope.mp needs an implication fact"
        p, q = node[1], node[2]
        assert self.pb.circuit(f_p) == self.close(p), "antecedent mismatch"
        if self.conj is None:
            return self.pb.mp(f_p, f_imp)
        a2 = self.pb.ax("a2", self.conj, p, q)
        return self.pb.mp(f_p, self.pb.mp(f_imp, a2))

    def lift(self, fact: int, extra: int) -> int:
        """Reinterpret a fact of this scope inside the extension of the
        scope by one more hypothesis."""
        if self.conj is None:
            return weaken_line(self.pb, extra, fact)
        proj = self.pb.ax("a3", self.conj, extra)
        return chain_line(self.pb, proj, fact)

    def curry(self, sub_fact: int, extra: int) -> int:
        """A sub-scope fact of c (hypotheses + [extra]) becomes this
        scope's fact of extra -> c."""
        if self.conj is None:
            return sub_fact
        line = sub_fact                       # (H & extra) -> c
        node = self.st.nodes[self.pb.circuit(line)]
        assert node[0] == "imp" and node[1] == self.st.and_(self.conj, extra)
        a5 = self.pb.ax("a5", self.conj, extra)   # H -> (extra -> H & extra)
        u = under_imp(self.pb, extra, line)
        return chain_line(self.pb, a5, u)

    def and_intro(self, f_a: int, f_b: int) -> int:
        a, b = self.body(f_a), self.body(f_b)
        return self.mp(f_b, self.mp(f_a, self.ax("a5", a, b)))

    def conj_intro(self, facts: list[int]) -> int:
        assert facts
        out = facts[0]
        for f in facts[1:]:
            out = self.and_intro(out, f)
        return out

    def and_elim(self, fact: int, side: int) -> int:
        node = self.st.nodes[self.body(fact)]
        assert node[0] == "and"
        return self.mp(fact, self.ax("a3" if side == 0 else "a4",
                                     node[1], node[2]))

    def or_intro(self, fact: int, items: list[int], k: int) -> int:
        assert self.body(fact) == items[k]
        return self.mp(fact, self.admit(disj_inj(self.pb, items, k)))

    def by_disj(self, f_disj: int, items: list[int], branch) -> int:
        """Case analysis: ``branch(sub_scope, k)`` must return the
        sub-scope fact of a target common to all branches."""
        assert self.body(f_disj) == self.st.disj(items)
        curried = []
        target = None
        for k, item in enumerate(items):
            sub = self.sub(item)
            f = branch(sub, k)
            body = sub.body(f)
            assert target is None or body == target, "branches disagree"
            target = body
            curried.append(self.curry(f, item))
        line = curried[0]
        acc = items[0]
        for item, br in zip(items[1:], curried[1:]):
            a8 = self.ax("a8", acc, item, target)
            line = self.mp(br, self.mp(line, a8))
            acc = self.st.or_(acc, item)
        return self.mp(f_disj, line)

    def sub(self, extra: int) -> "Scope":
        return Scope(self.pb, self.hyps + [extra])


def restrict_antecedent(pb: ProofBuilder, line: int, old_items: list[int],
                        new_items: list[int],
                        provided: dict[int, int] | None = None) -> int:
    """From |- conj(old_items) -> x produce |- conj(new_items) -> x,
    where every old conjunct is either among new_items or has a
    premise-free line in ``provided``.  Handles reordering, weakening,
    and discharge of proved conjuncts."""
    st = pb.store
    node = st.nodes[pb.circuit(line)]
    assert node[0] == "imp" and node[1] == st.conj(old_items), \
        "antecedent does not match the stated conjuncts"
    provided = provided or {}
    sc = Scope(pb, [st.conj(new_items)] if len(new_items) > 1 else list(new_items))
    if not new_items:
        sc = Scope(pb, [])
    facts = {}
    for it in new_items:
        facts[it] = conj_proj(pb, new_items, new_items.index(it)) \
            if len(new_items) > 1 else refl_line(pb, it)
    parts = []
    for it in old_items:
        if it in facts:
            parts.append(facts[it])
        elif it in provided:
            parts.append(sc.admit(provided[it]))
        else:
            raise ValueError("conjunct neither kept nor provided")
    whole = sc.conj_intro(parts) if parts else sc.admit(pb.ax("top"))
    return sc.mp(whole, sc.admit(line))


# -- boolean skeletons over atomic subcircuits --------------------------------

def boolean_atoms(store: CircuitStore, nid: int) -> list[int]:
    """Maximal subcircuits that are not boolean connectives (variables
    and boxed circuits), in deterministic first-visit order."""
    out: list[int] = []
    seen: set[int] = set()

    def walk(s: int) -> None:
        if s in seen:
            return
        seen.add(s)
        if store.tag(s) in BOOL_TAGS:
            for c in store.children(s):
                walk(c)
        else:
            out.append(s)

    walk(nid)
    return out


def eval_skeleton(store: CircuitStore, nid: int, env: dict[int, bool]) -> bool:
    memo: dict[int, bool] = {}

    def ev(s: int) -> bool:
        if s in memo:
            return memo[s]
        if s in env:
            v = env[s]
        else:
            tag = store.tag(s)
            if tag == "top":
                v = True
            elif tag == "bot":
                v = False
            elif tag == "not":
                v = not ev(store.children(s)[0])
            elif tag == "and":
                a, b = store.children(s)
                v = ev(a) and ev(b)
            elif tag == "or":
                a, b = store.children(s)
                v = ev(a) or ev(b)
            elif tag == "imp":
                a, b = store.children(s)
                v = (not ev(a)) or ev(b)
            else:
                raise ValueError(f"non-boolean node {tag} is not an atom here")
        memo[s] = v
        return v

    return ev(nid)


def is_taut_over_atoms(store: CircuitStore, nid: int, atoms: list[int]) -> bool:
    for bits in range(1 << len(atoms)):
        env = {a: bool(bits >> i & 1) for i, a in enumerate(atoms)}
        if not eval_skeleton(store, nid, env):
            return False
    return True


def _forced(store: CircuitStore, node: int, env: dict[int, bool],
            memo: dict[int, bool | None]) -> bool | None:
    """Three-valued evaluation under a partial atom assignment."""
    if node in memo:
        return memo[node]
    if node in env:
        v: bool | None = env[node]
    else:
        tag = store.tag(node)
        if tag == "top":
            v = True
        elif tag == "bot":
            v = False
        elif tag == "not":
            c = _forced(store, store.children(node)[0], env, memo)
            v = None if c is None else not c
        elif tag in ("and", "or", "imp"):
            a, b = store.children(node)
            fa = _forced(store, a, env, memo)
            fb = _forced(store, b, env, memo)
            if tag == "and":
                v = (False if fa is False or fb is False
                     else True if fa is True and fb is True else None)
            elif tag == "or":
                v = (True if fa is True or fb is True
                     else False if fa is False and fb is False else None)
            else:
                v = (True if fa is False or fb is True
                     else False if fa is True and fb is False else None)
        else:
            v = None   # an unassigned atom
    memo[node] = v
    return v


def _pick_blocker(store: CircuitStore, node: int, env: dict[int, bool],
                  memo: dict[int, bool | None]) -> int:
    """A deterministic unassigned atom the value of ``node`` hinges on."""
    if _forced(store, node, env, memo) is not None:
        raise AssertionError("nothing blocks a forced node")
    tag = store.tag(node)
    if tag in BOOL_TAGS and tag not in ("top", "bot"):
        for c in store.children(node):
            if _forced(store, c, env, memo) is None:
                return _pick_blocker(store, c, env, memo)
        raise AssertionError("compound with forced children cannot block")
    return node


# -- scripted case lemmas for the classical prover ----------------------------

def _not_bot_fact(sc: Scope) -> int:
    pb = sc.pb
    st = pb.store
    line = pb.mp(refl_line(pb, st.bot()), pb.ax("notI", st.bot()))
    return sc.admit(line)


def _neg_to_imp(sc: Scope, f_neg: int, psi: int) -> int:
    return sc.mp(f_neg, sc.ax("notE", psi))


def _imp_to_neg(sc: Scope, f_imp_bot: int, psi: int) -> int:
    return sc.mp(f_imp_bot, sc.ax("notI", psi))


def excluded_middle(pb: ProofBuilder, x: int) -> int:
    """|- x or not x, via Peirce's law."""
    st = pb.store
    disj = st.or_(x, st.neg(x))
    known = pb.have(disj)
    if known is not None:
        return known
    hyp0 = st.imp(disj, st.bot())
    sc = Scope(pb, [hyp0])
    sub = sc.sub(x)
    f_d = sub.mp(sub.hyp(1), sub.ax("a6", x, st.neg(x)))
    f_bot = sub.mp(f_d, sub.hyp(0))
    f_x_bot = sc.curry(f_bot, x)             # (d -> bot) scope: x -> bot
    f_nx = sc.mp(f_x_bot, sc.ax("notI", x))
    f_d2 = sc.mp(f_nx, sc.ax("a7", x, st.neg(x)))
    peirce = pb.ax("peirce", disj, st.bot())
    return pb.mp(f_d2, peirce)


# -- the classical prover ------------------------------------------------------

class TautologyError(ValueError):
    pass


def derive_taut(pb: ProofBuilder, target: int,
                atoms: list[int] | None = None) -> int:
    """Derive a classical tautology by case analysis on its atomic
    subcircuits, splitting only on atoms the value still hinges on."""
    assert pb.logic.has_axiom("peirce"), "classical reasoning only"
    st = pb.store
    known = pb.have(target)
    if known is not None:
        return known
    if atoms is None:
        atoms = boolean_atoms(st, target)
    if not is_taut_over_atoms(st, target, atoms):
        raise TautologyError("not a tautology over its atoms")

    def signed(sc: Scope, node: int, env, fmemo, cache) -> tuple[bool, int]:
        """(value, fact of node or of its negation); only recurses into
        children whose facts the script actually consumes."""
        if node in cache:
            return cache[node]
        if node in env:
            v = env[node]
            out = (v, sc.hyp(sc.hyps.index(node if v else st.neg(node))))
            cache[node] = out
            return out
        tag = st.tag(node)
        if tag == "top":
            out = (True, sc.ax("top"))
        elif tag == "bot":
            out = (False, _not_bot_fact(sc))
        elif tag == "not":
            child = st.children(node)[0]
            v, f = signed(sc, child, env, fmemo, cache)
            if not v:
                out = (True, f)
            else:
                inner = sc.sub(node)
                f_ib = _neg_to_imp(inner, inner.hyp(len(inner.hyps) - 1), child)
                f_bot = inner.mp(sc.lift(f, node), f_ib)
                out = (False, _imp_to_neg(sc, sc.curry(f_bot, node), node))
        elif tag == "and":
            a, b = st.children(node)
            fa = _forced(st, a, env, fmemo)
            fb = _forced(st, b, env, fmemo)
            if fa is True and fb is True:
                _, f1 = signed(sc, a, env, fmemo, cache)
                _, f2 = signed(sc, b, env, fmemo, cache)
                out = (True, sc.mp(f2, sc.mp(f1, sc.ax("a5", a, b))))
            elif fa is False:
                _, f1 = signed(sc, a, env, fmemo, cache)
                out = (False, _conj_refute(sc, node, "a3", a, f1))
            else:
                assert fb is False
                _, f2 = signed(sc, b, env, fmemo, cache)
                out = (False, _conj_refute(sc, node, "a4", b, f2))
        elif tag == "or":
            a, b = st.children(node)
            fa = _forced(st, a, env, fmemo)
            if fa is True:
                _, f1 = signed(sc, a, env, fmemo, cache)
                out = (True, sc.mp(f1, sc.ax("a6", a, b)))
            else:
                vb, f2 = signed(sc, b, env, fmemo, cache)
                if vb:
                    out = (True, sc.mp(f2, sc.ax("a7", a, b)))
                else:
                    _, f1 = signed(sc, a, env, fmemo, cache)
                    out = (False, _disj_refute(sc, node, f1, f2))
        elif tag == "imp":
            a, b = st.children(node)
            fb = _forced(st, b, env, fmemo)
            if fb is True:
                _, f2 = signed(sc, b, env, fmemo, cache)
                out = (True, sc.mp(f2, sc.ax("a1", b, a)))
            else:
                va, f1 = signed(sc, a, env, fmemo, cache)
                if not va:
                    inner = sc.sub(a)
                    f_bot = inner.mp(inner.hyp(len(inner.hyps) - 1),
                                     _neg_to_imp(inner, sc.lift(f1, a), a))
                    f_b = inner.mp(f_bot, inner.ax("efq", b))
                    out = (True, sc.curry(f_b, a))
                else:
                    _, f2 = signed(sc, b, env, fmemo, cache)
                    inner = sc.sub(node)
                    got = inner.mp(sc.lift(f1, node),
                                   inner.hyp(len(inner.hyps) - 1))
                    f_bot = inner.mp(got, _neg_to_imp(inner,
                                                      sc.lift(f2, node), b))
                    out = (False, _imp_to_neg(sc, sc.curry(f_bot, node), node))
        else:
            raise AssertionError(f"unexpected atom {tag}")
        cache[node] = out
        return out

    def _conj_refute(sc: Scope, node: int, proj: str, bad: int,
                     f_bad_neg: int) -> int:
        a, b = st.children(node)
        inner = sc.sub(node)
        got = inner.mp(inner.hyp(len(inner.hyps) - 1), inner.ax(proj, a, b))
        f_bot = inner.mp(got, _neg_to_imp(inner, sc.lift(f_bad_neg, node), bad))
        return _imp_to_neg(sc, sc.curry(f_bot, node), node)

    def _disj_refute(sc: Scope, node: int, f1: int, f2: int) -> int:
        a, b = st.children(node)
        inner = sc.sub(node)
        ia = _neg_to_imp(inner, sc.lift(f1, node), a)
        ib = _neg_to_imp(inner, sc.lift(f2, node), b)
        f_elim = inner.mp(ib, inner.mp(ia, inner.ax("a8", a, b, st.bot())))
        f_bot = inner.mp(inner.hyp(len(inner.hyps) - 1), f_elim)
        return _imp_to_neg(sc, sc.curry(f_bot, node), node)

    def by_cases(hyps: list[int], env: dict[int, bool]) -> int:
        fmemo: dict[int, bool | None] = {}
        sc = Scope(pb, hyps)
        if _forced(st, target, env, fmemo) is True:
            v, f = signed(sc, target, env, fmemo, {})
            assert v
            return f
        x = _pick_blocker(st, target, env, fmemo)
        pos = by_cases(hyps + [x], {**env, x: True})
        neg = by_cases(hyps + [st.neg(x)], {**env, x: False})
        cpos = sc.curry(pos, x)
        cneg = sc.curry(neg, st.neg(x))
        a8 = sc.ax("a8", x, st.neg(x), target)
        step = sc.mp(cneg, sc.mp(cpos, a8))
        return sc.mp(sc.admit(excluded_middle(pb, x)), step)

    line = by_cases([], {})
    assert pb.circuit(line) == target
    return line


def derive_by_taut(pb: ProofBuilder, target: int,
                   premises: tuple[int, ...] = ()) -> int:
    """Derive ``target`` as a tautological consequence of derived lines."""
    st = pb.store
    goal = target
    for i in reversed(premises):
        goal = st.imp(pb.circuit(i), goal)
    line = derive_taut(pb, goal)
    for i in premises:
        line = pb.mp(i, line)
    return line


def prove_classical(store: CircuitStore, logic: LogicSpec, phi: int,
                    system: str = "CF") -> Proof:
    pb = ProofBuilder(store, system, logic)
    pb.conclude(derive_taut(pb, phi))
    return pb.build()


# -- modal combinators ---------------------------------------------------------

def box_mono(pb: ProofBuilder, line: int) -> int:
    """From |- x -> y give |- box x -> box y."""
    node = pb.store.nodes[pb.circuit(line)]
    assert node[0] == "imp"
    target = pb.store.imp(pb.store.box(node[1]), pb.store.box(node[2]))
    known = pb.have(target)
    if known is not None:
        return known
    return pb.mp(pb.nec(line), pb.ax("k", node[1], node[2]))


def box_conj(pb: ProofBuilder, a: int, b: int) -> int:
    """|- box a and box b -> box (a and b)."""
    st = pb.store
    target = st.imp(st.and_(st.box(a), st.box(b)), st.box(st.and_(a, b)))
    known = pb.have(target)
    if known is not None:
        return known
    l1 = box_mono(pb, pb.ax("a5", a, b))     # box a -> box (b -> a&b)
    k = pb.ax("k", b, st.and_(a, b))
    return derive_by_taut(pb, target, (l1, k))


def box_conj_list(pb: ProofBuilder, items: list[int]) -> int:
    """|- conj(box x_i) -> box conj(x_i), left-associated."""
    st = pb.store
    if not items:
        n = pb.nec(pb.ax("top"))
        return derive_by_taut(pb, st.imp(st.top(), st.box(st.top())), (n,))
    acc = items[0]
    line = refl_line(pb, st.box(acc))
    prefix = [st.box(items[0])]
    for x in items[1:]:
        step = box_conj(pb, acc, x)
        prefix.append(st.box(x))
        target = st.imp(st.conj(prefix), st.box(st.and_(acc, x)))
        line = derive_by_taut(pb, target, (line, step))
        acc = st.and_(acc, x)
    return line


def box_under(pb: ProofBuilder, boxed_items: list[int], line: int) -> int:
    """From |- conj(box x_i) -> b derive |- conj(box x_i) -> box b;
    needs transitivity to push the boxed antecedent inside."""
    st = pb.store
    node = st.nodes[pb.circuit(line)]
    assert node[0] == "imp"
    ante, b = node[1], node[2]
    assert ante == st.conj([st.box(x) for x in boxed_items])
    boxed = pb.mp(pb.nec(line), pb.ax("k", ante, b))   # box ante -> box b
    fours = tuple(pb.ax("4", x) for x in boxed_items)
    inner = box_conj_list(pb, [st.box(x) for x in boxed_items])
    return derive_by_taut(pb, st.imp(ante, st.box(b)), fours + (inner, boxed))


def bbox_intro(pb: ProofBuilder, line: int) -> int:
    """From |- x give |- bbox x."""
    st = pb.store
    x = pb.circuit(line)
    return derive_by_taut(pb, st.bbox(x), (line, pb.nec(line)))


def bbox_persist(pb: ProofBuilder, a: int) -> int:
    """|- bbox a -> box bbox a   (transitivity)."""
    st = pb.store
    target = st.imp(st.bbox(a), st.box(st.bbox(a)))
    known = pb.have(target)
    if known is not None:
        return known
    four = pb.ax("4", a)
    bc = box_conj(pb, a, st.box(a))
    return derive_by_taut(pb, target, (four, bc))


def bbox_mp(pb: ProofBuilder, a: int, b: int) -> int:
    """|- bbox a and bbox (a -> b) -> bbox b."""
    st = pb.store
    target = st.imp(st.and_(st.bbox(a), st.bbox(st.imp(a, b))), st.bbox(b))
    known = pb.have(target)
    if known is not None:
        return known
    return derive_by_taut(pb, target, (pb.ax("k", a, b),))


def guard_mp(pb: ProofBuilder, guard_items: list[int], line: int) -> int:
    """From |- conj(bbox g_i) -> b derive |- conj(bbox g_i) -> bbox b.

    The dotted-box analogue of ``box_under``: dotted-boxed antecedents
    persist through one box under transitivity, so b also holds boxed.
    """
    st = pb.store
    node = st.nodes[pb.circuit(line)]
    assert node[0] == "imp"
    ante, b = node[1], node[2]
    assert ante == st.conj([st.bbox(g) for g in guard_items])
    boxed = pb.mp(pb.nec(line), pb.ax("k", ante, b))   # box ante -> box b
    persists = tuple(bbox_persist(pb, g) for g in guard_items)
    inner = box_conj_list(pb, [st.bbox(g) for g in guard_items])
    return derive_by_taut(pb, st.imp(ante, st.bbox(b)),
                          persists + (inner, boxed, line))
