"""Textual S-expression format for circuits, QBFs, and substitutions.

Grammar::

    e ::= top | bot | (var NAME) | (not e) | (box e)
        | (and e e) | (or e e) | (imp e e)
        | (share ID e)          -- bind ID to the subterm, emit the subterm
        | (ref ID)              -- reuse a bound subterm

    qbf ::= (qbf ((Q NAME) ...) e)        with Q in {E, A}

Sharing labels make DAG structure explicit; the printer emits a
``share`` at the first occurrence of any node used more than once.
"""

from __future__ import annotations

from .circuits import (CircuitStore, QbfFormula, EXISTS, FORALL,
                       subcircuits)


class SexprError(ValueError):
    pass


def _tokenize(text: str):
    out = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
        elif c in "()":
            out.append(c)
            i += 1
        elif c == ";":
            while i < n and text[i] != "\n":
                i += 1
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in "();":
                j += 1
            out.append(text[i:j])
            i = j
    return out


def _parse_tokens(tokens: list[str], pos: int):
    if pos >= len(tokens):
        raise SexprError("unexpected end of input")
    tok = tokens[pos]
    if tok == "(":
        items = []
        pos += 1
        while pos < len(tokens) and tokens[pos] != ")":
            item, pos = _parse_tokens(tokens, pos)
            items.append(item)
        if pos >= len(tokens):
            raise SexprError("missing close paren")
        return items, pos + 1
    if tok == ")":
        raise SexprError("unexpected close paren")
    return tok, pos + 1


def parse_sexpr(text: str):
    tokens = _tokenize(text)
    tree, pos = _parse_tokens(tokens, 0)
    if pos != len(tokens):
        raise SexprError("trailing input after expression")
    return tree


def parse_many(text: str):
    tokens = _tokenize(text)
    pos, out = 0, []
    while pos < len(tokens):
        tree, pos = _parse_tokens(tokens, pos)
        out.append(tree)
    return out


def circuit_from_tree(store: CircuitStore, tree, shares: dict[str, int] | None = None) -> int:
    if shares is None:
        shares = {}
    if isinstance(tree, str):
        if tree == "top":
            return store.top()
        if tree == "bot":
            return store.bot()
        raise SexprError(f"unknown atom {tree!r}")
    if not tree:
        raise SexprError("empty expression")
    head = tree[0]
    if head == "var":
        if len(tree) != 2 or not isinstance(tree[1], str):
            raise SexprError("(var NAME) expected")
        return store.var(tree[1])
    if head == "share":
        if len(tree) != 3 or not isinstance(tree[1], str):
            raise SexprError("(share ID e) expected")
        nid = circuit_from_tree(store, tree[2], shares)
        shares[tree[1]] = nid
        return nid
    if head == "ref":
        if len(tree) != 2 or tree[1] not in shares:
            raise SexprError(f"unbound share reference {tree!r}")
        return shares[tree[1]]
    kids = [circuit_from_tree(store, t, shares) for t in tree[1:]]
    try:
        return store.node(head, kids)
    except (KeyError, AssertionError):
        raise SexprError(f"bad connective or arity: {tree!r}") from None


def parse_circuit(store: CircuitStore, text: str) -> int:
    return circuit_from_tree(store, parse_sexpr(text))


def print_circuit(store: CircuitStore, nid: int) -> str:
    """Deterministic printer; shared nodes get (share N ...) on first use."""
    order = subcircuits(store, nid)
    uses = {s: 0 for s in order}
    for s in order:
        for c in store.children(s):
            uses[c] += 1
    shared = {}
    counter = 0
    for s in order:  # deterministic share numbering
        if uses[s] > 1 and not store.is_var(s) and store.tag(s) not in ("top", "bot"):
            shared[s] = str(counter)
            counter += 1

    emitted: set[int] = set()

    def render(s: int) -> str:
        if s in emitted:
            return f"(ref {shared[s]})"
        tag = store.tag(s)
        if tag == "var":
            body = f"(var {store.var_name(s)})"
        elif tag in ("top", "bot"):
            body = tag
        else:
            kids = " ".join(render(c) for c in store.children(s))
            body = f"({tag} {kids})"
        if s in shared:
            emitted.add(s)
            return f"(share {shared[s]} {body})"
        return body

    return render(nid)


def qbf_from_tree(store: CircuitStore, tree) -> QbfFormula:
    if not (isinstance(tree, list) and len(tree) == 3 and tree[0] == "qbf"):
        raise SexprError("(qbf PREFIX MATRIX) expected")
    prefix = []
    for entry in tree[1]:
        if not (isinstance(entry, list) and len(entry) == 2
                and entry[0] in (EXISTS, FORALL) and isinstance(entry[1], str)):
            raise SexprError(f"bad quantifier entry {entry!r}")
        prefix.append((entry[0], store.var(entry[1])))
    matrix = circuit_from_tree(store, tree[2])
    bound = {store.var_name(v) for _, v in prefix}
    free = tuple(store.var(n) for n in
                 sorted({v for v in _circuit_var_names(store, matrix)} - bound))
    return QbfFormula(tuple(prefix), matrix, free)


def _circuit_var_names(store: CircuitStore, nid: int):
    from .circuits import variables
    return variables(store, nid)


def parse_qbf(store: CircuitStore, text: str) -> QbfFormula:
    return qbf_from_tree(store, parse_sexpr(text))


def print_qbf(store: CircuitStore, phi: QbfFormula) -> str:
    prefix = " ".join(f"({q} {store.var_name(v)})" for q, v in phi.prefix)
    return f"(qbf ({prefix}) {print_circuit(store, phi.matrix)})"
