"""Hash-consed circuit store for modal, intuitionistic, and boolean formulas.

A circuit is a node in an append-only interned DAG.  Structurally equal
nodes always get the same integer id, so node-id equality is structural
equality, and shared subterms are stored once.  Formulas are the tree
unfoldings of circuits; two distinct circuits may represent the same
formula (see ``same_formula``).

Connectives: ``var top bot not box and or imp``.  ``iff`` and the
boxed-conjunction ``bbox`` (phi AND box phi) are derived.  Language tags
restrict the allowed connectives:

* ``modal``       -- everything
* ``boolean``     -- no ``box``
* ``int``         -- only ``and or imp bot`` plus variables
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional

MODAL = "modal"
BOOLEAN = "boolean"
INT = "int"

IRR = "irr"    # one-point irreflexive flavour (the "bullet" star type)
REFL = "refl"  # one-point reflexive flavour (the "circle" star type)

ARITY = {"var": 0, "top": 0, "bot": 0, "not": 1, "box": 1,
         "and": 2, "or": 2, "imp": 2}

_LANG_TAGS = {
    MODAL: frozenset(ARITY),
    BOOLEAN: frozenset(ARITY) - {"box"},
    INT: frozenset({"var", "bot", "and", "or", "imp"}),
}


class CircuitStore:
    """Append-only interned table of circuit nodes.

    Node creation is not thread-safe; construct under a single writer,
    read freely afterwards.
    """

    def __init__(self) -> None:
        self.nodes: list[tuple] = []
        self._index: dict[tuple, int] = {}
        self._tree_size: dict[int, int] = {}

    def __len__(self) -> int:
        return len(self.nodes)

    def _mk(self, key: tuple) -> int:
        nid = self._index.get(key)
        if nid is None:
            nid = len(self.nodes)
            self.nodes.append(key)
            self._index[key] = nid
        return nid

    # -- constructors ---------------------------------------------------

    def var(self, name: str) -> int:
        return self._mk(("var", name))

    def top(self) -> int:
        return self._mk(("top",))

    def bot(self) -> int:
        return self._mk(("bot",))

    def neg(self, a: int) -> int:
        return self._mk(("not", a))

    def box(self, a: int) -> int:
        return self._mk(("box", a))

    def and_(self, a: int, b: int) -> int:
        return self._mk(("and", a, b))

    def or_(self, a: int, b: int) -> int:
        return self._mk(("or", a, b))

    def imp(self, a: int, b: int) -> int:
        return self._mk(("imp", a, b))

    def iff(self, a: int, b: int) -> int:
        return self.and_(self.imp(a, b), self.imp(b, a))

    def bbox(self, a: int) -> int:
        """phi AND box phi (written as a dotted box in the literature)."""
        return self.and_(a, self.box(a))

    def conj(self, items: Iterable[int]) -> int:
        """Left-associated conjunction; empty conjunction is top."""
        items = list(items)
        if not items:
            return self.top()
        out = items[0]
        for x in items[1:]:
            out = self.and_(out, x)
        return out

    def disj(self, items: Iterable[int]) -> int:
        """Left-associated disjunction; empty disjunction is bot."""
        items = list(items)
        if not items:
            return self.bot()
        out = items[0]
        for x in items[1:]:
            out = self.or_(out, x)
        return out

    def node(self, tag: str, children: Iterable[int] = (), name: str | None = None) -> int:
        if tag == "var":
            assert name is not None
            return self.var(name)
        kids = tuple(children)
        assert len(kids) == ARITY[tag], (tag, kids)
        return self._mk((tag,) + kids)

    # -- accessors -------------------------------------------------------

    def tag(self, nid: int) -> str:
        return self.nodes[nid][0]

    def children(self, nid: int) -> tuple[int, ...]:
        node = self.nodes[nid]
        return node[1:] if node[0] != "var" else ()

    def var_name(self, nid: int) -> str:
        node = self.nodes[nid]
        assert node[0] == "var"
        return node[1]

    def is_var(self, nid: int) -> bool:
        return self.nodes[nid][0] == "var"

    def tree_size(self, nid: int) -> int:
        """Size of the represented formula (tree unfolding; may be huge)."""
        memo = self._tree_size
        out = memo.get(nid)
        if out is None:
            out = 1 + sum(self.tree_size(c) for c in self.children(nid))
            memo[nid] = out
        return out


@dataclass(frozen=True)
class CircuitRef:
    """A store-scoped circuit id together with its language tag."""

    nid: int
    lang: str

    def __post_init__(self) -> None:
        assert self.lang in _LANG_TAGS, self.lang


def lang_ok(store: CircuitStore, nid: int, lang: str) -> bool:
    allowed = _LANG_TAGS[lang]
    return all(store.tag(s) in allowed for s in subcircuits(store, nid))


def subcircuits(store: CircuitStore, nid: int) -> list[int]:
    """All distinct subcircuits of ``nid``, children before parents.

    The order is deterministic: depth-first, left-to-right, post-order.
    """
    seen: set[int] = set()
    out: list[int] = []
    stack: list[tuple[int, bool]] = [(nid, False)]
    while stack:
        node, expanded = stack.pop()
        if node in seen:
            continue
        if expanded:
            seen.add(node)
            out.append(node)
        else:
            stack.append((node, True))
            for c in reversed(store.children(node)):
                if c not in seen:
                    stack.append((c, False))
    return out


def dag_size(store: CircuitStore, nid: int) -> int:
    return len(subcircuits(store, nid))


def variables(store: CircuitStore, nid: int) -> list[str]:
    """Variable names occurring in ``nid``, sorted."""
    return sorted(store.var_name(s) for s in subcircuits(store, nid)
                  if store.is_var(s))


def substitute(store: CircuitStore, sigma: dict[int, int], nid: int,
               memo: dict[int, int] | None = None) -> int:
    """Simultaneous substitution.  ``sigma`` maps variable node ids to
    circuits; unmapped variables stay themselves."""
    if memo is None:
        memo = {}
    order = subcircuits(store, nid)
    for s in order:
        if s in memo:
            continue
        tag = store.tag(s)
        if tag == "var":
            memo[s] = sigma.get(s, s)
        else:
            kids = tuple(memo[c] for c in store.children(s))
            memo[s] = store._mk((tag,) + kids)
    return memo[nid]


def subst_by_name(store: CircuitStore, sigma: dict[str, int], nid: int) -> int:
    return substitute(store, {store.var(k): v for k, v in sigma.items()}, nid)


def same_formula(store: CircuitStore, a: int, b: int,
                 memo: dict[tuple[int, int], bool] | None = None) -> bool:
    """Do two circuits represent the same formula (equal tree unfoldings)?

    Decided by memoized structural bisimulation; never unfolds.
    """
    if memo is None:
        memo = {}
    if a == b:
        return True
    key = (a, b) if a < b else (b, a)
    out = memo.get(key)
    if out is not None:
        return out
    na, nb = store.nodes[a], store.nodes[b]
    if na[0] != nb[0] or len(na) != len(nb):
        memo[key] = False
        return False
    if na[0] == "var":
        memo[key] = na[1] == nb[1]
        return memo[key]
    memo[key] = True  # guard; DAGs are acyclic so no real cycles arise
    out = all(same_formula(store, ca, cb, memo)
              for ca, cb in zip(na[1:], nb[1:]))
    memo[key] = out
    return out


# -- polarity ------------------------------------------------------------

MONOTONE_TAGS = frozenset({"and", "or", "top", "bot"})
POSITIVE_TAGS = frozenset({"box", "and", "or", "imp", "top", "var"})


def is_monotone_in(store: CircuitStore, nid: int, names: frozenset[str]) -> bool:
    """Built from the given variables by and/or/top/bot and subcircuits
    not containing them."""
    def touches(s: int) -> bool:
        return any(store.is_var(t) and store.var_name(t) in names
                   for t in subcircuits(store, s))

    for s in subcircuits(store, nid):
        tag = store.tag(s)
        if tag in MONOTONE_TAGS:
            continue
        if tag == "var" and store.var_name(s) in names:
            continue
        # any other node must be variable-disjoint from `names`...
        if touches(s):
            # ...unless every path from it to the names goes through a
            # monotone context; easiest sound check: reject.
            return False
    return True


def is_nnf_in(store: CircuitStore, nid: int, names: frozenset[str]) -> bool:
    """Monotone in positive and negated occurrences of the variables."""
    def ok(s: int) -> bool:
        tag = store.tag(s)
        if tag in MONOTONE_TAGS:
            return all(ok(c) for c in store.children(s))
        if tag == "var":
            return True
        if tag == "not" and store.is_var(store.children(s)[0]):
            return True
        return not any(store.is_var(t) and store.var_name(t) in names
                       for t in subcircuits(store, s))
    return ok(nid)


def is_positive(store: CircuitStore, nid: int) -> bool:
    """No bot and no negation anywhere."""
    return all(store.tag(s) in POSITIVE_TAGS for s in subcircuits(store, nid))


def polarity_check(store: CircuitStore, nid: int, names: Iterable[str]) -> str:
    """Report the strongest class among monotone / nnf / positive / none."""
    names = frozenset(names)
    if is_monotone_in(store, nid, names):
        return "monotone"
    if is_nnf_in(store, nid, names):
        return "nnf"
    if is_positive(store, nid):
        return "positive"
    return "none"


# -- syntactic translations ----------------------------------------------

def mk_b_star(store: CircuitStore, star: str, chi: int) -> int:
    """Side-premise former for the extension rules: box chi for the
    irreflexive flavour, (chi iff box chi) for the reflexive one."""
    if star == IRR:
        return store.box(chi)
    assert star == REFL
    return store.iff(chi, store.box(chi))


def gmt_translate(store: CircuitStore, nid: int) -> int:
    """Goedel-McKinsey-Tarski embedding of an intuitionistic circuit into
    modal language: box every variable, box every implication."""
    memo: dict[int, int] = {}
    for s in subcircuits(store, nid):
        tag = store.tag(s)
        if tag == "var":
            memo[s] = store.box(s)
        elif tag == "bot":
            memo[s] = s
        elif tag in ("and", "or"):
            a, b = (memo[c] for c in store.children(s))
            memo[s] = store.node(tag, (a, b))
        elif tag == "imp":
            a, b = (memo[c] for c in store.children(s))
            memo[s] = store.box(store.imp(a, b))
        else:
            raise ValueError(f"not an intuitionistic connective: {tag}")
    return memo[nid]


def one_point_translate(store: CircuitStore, star: str, nid: int) -> int:
    """Erase boxes per validity in the one-point frame: boxes become top
    (irreflexive point) or disappear (reflexive point)."""
    memo: dict[int, int] = {}
    for s in subcircuits(store, nid):
        tag = store.tag(s)
        if tag == "box":
            memo[s] = store.top() if star == IRR else memo[store.children(s)[0]]
        elif tag == "var":
            memo[s] = s
        else:
            kids = tuple(memo[c] for c in store.children(s))
            memo[s] = store._mk((tag,) + kids)
    return memo[nid]


def normalize_negations(store: CircuitStore, nid: int) -> int:
    """Rewrite not(phi) as phi -> bot and top as bot -> bot."""
    memo: dict[int, int] = {}
    for s in subcircuits(store, nid):
        tag = store.tag(s)
        if tag == "not":
            memo[s] = store.imp(memo[store.children(s)[0]], store.bot())
        elif tag == "top":
            memo[s] = store.imp(store.bot(), store.bot())
        elif tag == "var":
            memo[s] = s
        else:
            kids = tuple(memo[c] for c in store.children(s))
            memo[s] = store._mk((tag,) + kids)
    return memo[nid]


def bot_to_var(store: CircuitStore, nid: int, r: int) -> int:
    """Replace every bot with the variable ``r`` (the core of the
    positive translation); input must be negation-free."""
    memo: dict[int, int] = {}
    for s in subcircuits(store, nid):
        tag = store.tag(s)
        if tag == "bot":
            memo[s] = r
        elif tag == "var":
            memo[s] = s
        elif tag == "not":
            raise ValueError("normalize negations away first")
        else:
            kids = tuple(memo[c] for c in store.children(s))
            memo[s] = store._mk((tag,) + kids)
    return memo[nid]


def positive_translate(store: CircuitStore, nid: int, r: int,
                       lang: str = MODAL) -> int:
    """Guarded bot-free version of a circuit, over a fresh variable r.

    Negations are first rewritten to implications-to-bot, then bot is
    replaced by r throughout, and the result is guarded by premises
    forcing r to behave like bot.  In the modal case the guard also has
    to make r hereditary (r -> box r, under a dotted box), otherwise
    boxed consequences of bot are lost.
    """
    assert store.is_var(r)
    rname = store.var_name(r)
    core = normalize_negations(store, nid)
    if any(store.is_var(s) and store.var_name(s) == rname
           for s in subcircuits(store, core)):
        raise ValueError(f"guard variable {rname!r} occurs in the circuit")
    prime = bot_to_var(store, core, r)
    guards = []
    if lang == MODAL:
        guards.append(store.bbox(store.imp(r, store.box(r))))
        guards.extend(store.bbox(store.imp(r, store.var(v)))
                      for v in variables(store, core))
    else:
        guards.extend(store.imp(r, store.var(v))
                      for v in variables(store, core))
    return store.imp(store.conj(guards), prime)


def translate_e(store: CircuitStore, nid: int, e: dict[int, int],
                nu: dict[int, int]) -> int:
    """Fix variables by ``nu`` and replace topmost boxed subcircuits whose
    nu-image is assigned 0 by ``e`` with bot.

    ``e`` maps (variable-free) circuit ids to 0/1 and must cover
    nu(psi) for every box psi in the input.
    """
    memo: dict[int, int] = {}
    for s in subcircuits(store, nid):
        tag = store.tag(s)
        if tag == "var":
            memo[s] = nu.get(s, s)
        elif tag == "box":
            child = store.children(s)[0]
            key = substitute(store, nu, child)
            if key not in e:
                raise ValueError("assignment undefined on a boxed subcircuit")
            memo[s] = store.box(memo[child]) if e[key] else store.bot()
        else:
            kids = tuple(memo[c] for c in store.children(s))
            memo[s] = store._mk((tag,) + kids)
    return memo[nid]


# -- definitional (extension) encoding ------------------------------------

Q_PREFIX = "q!"
EXT_PREFIX = "e!"


@dataclass(frozen=True)
class ExtensionEncoding:
    """The conjunction of dotted-boxed definitions q_psi == psi*, one per
    subcircuit, plus the output variable naming the whole circuit."""

    e_circuit: int
    output_var: int
    var_map: tuple[tuple[int, int], ...]  # (subcircuit, its q-variable)

    def qvar(self, sub: int) -> int:
        for s, q in self.var_map:
            if s == sub:
                return q
        raise KeyError(sub)


def extension_encoding(store: CircuitStore, nid: int,
                       prefix: str = Q_PREFIX) -> ExtensionEncoding:
    """Definitional encoding of a circuit: for every subcircuit psi a
    fresh variable q_psi, with q_psi == psi (variables) or
    q_psi == c(q_children) otherwise, each definition under a dotted box.

    q-variables are numbered in the deterministic subcircuit order, so
    the encoding is reproducible.
    """
    subs = subcircuits(store, nid)
    qvar = {s: store.var(f"{prefix}{i}") for i, s in enumerate(subs)}
    conjuncts = []
    for s in subs:
        if store.is_var(s):
            body = s
        else:
            body = store.node(store.tag(s),
                              tuple(qvar[c] for c in store.children(s)))
        conjuncts.append(store.bbox(store.iff(qvar[s], body)))
    return ExtensionEncoding(store.conj(conjuncts), qvar[nid],
                             tuple((s, qvar[s]) for s in subs))


# -- quantified boolean formulas ------------------------------------------

EXISTS = "E"
FORALL = "A"


@dataclass(frozen=True)
class QbfFormula:
    """Prenex quantified boolean formula: quantifier prefix over distinct
    variables plus a boolean matrix; remaining variables are free."""

    prefix: tuple[tuple[str, int], ...]
    matrix: int
    free_vars: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        names = [q for _, q in self.prefix]
        assert len(names) == len(set(names)), "duplicate bound variable"
        assert not (set(names) & set(self.free_vars))

    @property
    def bound_vars(self) -> tuple[int, ...]:
        return tuple(q for _, q in self.prefix)


def qbf_check(store: CircuitStore, phi: QbfFormula) -> None:
    assert lang_ok(store, phi.matrix, BOOLEAN)
    allowed = {store.var_name(v) for v in phi.bound_vars + tuple(phi.free_vars)}
    used = set(variables(store, phi.matrix))
    assert used <= allowed, f"matrix uses undeclared variables {used - allowed}"


def qbf_to_modal(store: CircuitStore, phi: QbfFormula) -> int:
    """Modal encoding, innermost-out.

    An existential step produces two boxed guarded disjuncts sharing one
    copy of the body (genuine DAG sharing); a universal step guards the
    body by the decidedness of the quantified variable.
    """
    body = phi.matrix
    for quant, q in reversed(phi.prefix):
        bq, bnq = store.bbox(q), store.bbox(store.neg(q))
        if quant == FORALL:
            body = store.imp(store.or_(bq, bnq), body)
        else:
            body = store.or_(store.box(store.imp(bq, body)),
                             store.box(store.imp(bnq, body)))
    return body


def qbf_to_int(store: CircuitStore, phi: QbfFormula) -> int:
    """Box-erasure of the modal encoding (negation spelled imp-to-bot so
    the result is intuitionistic)."""
    body = _int_matrix(store, phi.matrix)
    for quant, q in reversed(phi.prefix):
        nq = store.imp(q, store.bot())
        if quant == FORALL:
            body = store.imp(store.or_(q, nq), body)
        else:
            body = store.or_(store.imp(q, body), store.imp(nq, body))
    return body


def _int_matrix(store: CircuitStore, nid: int) -> int:
    out = normalize_negations(store, nid)
    # normalize_negations leaves no `top`/`not`; result is intuitionistic
    return out


def qbf_negate(store: CircuitStore, phi: QbfFormula) -> QbfFormula:
    """Prenex normal form of the negation: dualize quantifiers, negate
    the matrix."""
    dual = tuple((FORALL if q == EXISTS else EXISTS, v) for q, v in phi.prefix)
    return QbfFormula(dual, store.neg(phi.matrix), phi.free_vars)


def nnf(store: CircuitStore, nid: int, negated: bool = False) -> int:
    """Negation normal form of a boolean circuit."""
    tag = store.tag(nid)
    if tag == "var":
        return store.neg(nid) if negated else nid
    if tag == "top":
        return store.bot() if negated else nid
    if tag == "bot":
        return store.top() if negated else nid
    if tag == "not":
        return nnf(store, store.children(nid)[0], not negated)
    a, b = store.children(nid)
    if tag == "imp":
        # a -> b  ==  not a  or  b
        if negated:
            return store.and_(nnf(store, a, False), nnf(store, b, True))
        return store.or_(nnf(store, a, True), nnf(store, b, False))
    if tag == "and":
        op = store.or_ if negated else store.and_
    else:
        op = store.and_ if negated else store.or_
    return op(nnf(store, a, negated), nnf(store, b, negated))


def is_nnf_circuit(store: CircuitStore, nid: int) -> bool:
    for s in subcircuits(store, nid):
        tag = store.tag(s)
        if tag in ("imp", "box"):
            return False
        if tag == "not" and not store.is_var(store.children(s)[0]):
            return False
    return True


def qbf_dual(store: CircuitStore, phi: QbfFormula) -> QbfFormula:
    """Swap and/or, top/bot, forall/exists in a formula in negation
    normal form (literals are kept as they are)."""
    if not is_nnf_circuit(store, phi.matrix):
        raise ValueError("dual requires a matrix in negation normal form")
    memo: dict[int, int] = {}
    for s in subcircuits(store, phi.matrix):
        tag = store.tag(s)
        if tag in ("var", "not"):
            memo[s] = s if tag == "var" else store.neg(memo[store.children(s)[0]])
        elif tag == "top":
            memo[s] = store.bot()
        elif tag == "bot":
            memo[s] = store.top()
        else:
            a, b = (memo[c] for c in store.children(s))
            memo[s] = store.or_(a, b) if tag == "and" else store.and_(a, b)
    dual_prefix = tuple((FORALL if q == EXISTS else EXISTS, v)
                        for q, v in phi.prefix)
    return QbfFormula(dual_prefix, memo[phi.matrix], phi.free_vars)
