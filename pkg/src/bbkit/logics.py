"""Logic specifications: axiom schemata, base rules, and frame metadata.

A logic is a finite list of axiom schemata over designated schema
variables ``?0 ?1 ...`` plus modus ponens (and necessitation in the
modal case).  The shipped logics are the classical base, the standard
transitive modal logics, their bounded-branching strengthenings, and
the intuitionistic side (IPC and the bounded-branching tree logics).

Schema variables are ordinary variables with reserved names, so schema
instantiation is plain substitution.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .circuits import (CircuitStore, INT, IRR, MODAL, BOOLEAN, REFL,
                       subst_by_name, substitute, subcircuits)

SCHEMA_PREFIX = "?"


def schema_vars(store: CircuitStore, nid: int) -> list[int]:
    return [s for s in subcircuits(store, nid)
            if store.is_var(s) and store.var_name(s).startswith(SCHEMA_PREFIX)]


@dataclass(frozen=True)
class AxiomSchema:
    schema_id: str
    pattern: int
    # shape tag for the extension-rule machinery: one of
    # "base" (classical/K/4 handled specially), "irr1" (boxed
    # Loeb-like shape), "refl2" (unboxing shape), "refl3" (cluster
    # shape), "bb" (bounded branching), or "other".
    shape: str = "other"


@dataclass(frozen=True)
class LogicSpec:
    name: str
    language: str                      # modal | int | boolean
    axioms: tuple[AxiomSchema, ...]
    has_nec: bool
    stars: frozenset[str] = frozenset()  # extensible flavours: irr / refl
    branching: int | None = None         # k of the bounded-branching axiom
    frame_class: str = ""                # key used by the semantic oracle

    def axiom(self, schema_id: str) -> AxiomSchema:
        for ax in self.axioms:
            if ax.schema_id == schema_id:
                return ax
        raise KeyError(f"{self.name} has no axiom {schema_id}")

    def has_axiom(self, schema_id: str) -> bool:
        return any(ax.schema_id == schema_id for ax in self.axioms)


def bounded_branching_axiom(store: CircuitStore, k: int,
                            args: list[int]) -> int:
    """The branching-at-most-k schema instantiated at the given k+1
    circuits; with schema variables it is the schema pattern itself.

    box[ OR_i box(bb a_i -> OR_{j!=i} bb a_j) -> OR_i bb a_i ]
      -> OR_i box OR_{j!=i} bb a_j
    """
    assert len(args) == k + 1
    bb = [store.bbox(a) for a in args]
    drop = [store.disj([bb[j] for j in range(k + 1) if j != i])
            for i in range(k + 1)]
    antecedent = store.box(store.imp(
        store.disj([store.box(store.imp(bb[i], drop[i])) for i in range(k + 1)]),
        store.disj(bb)))
    return store.imp(antecedent, store.disj([store.box(d) for d in drop]))


def tree_branching_axiom(store: CircuitStore, k: int, args: list[int]) -> int:
    """Intuitionistic branching-at-most-k schema:
    [ OR_i (a_i -> OR_{j!=i} a_j) -> OR_i a_i ] -> OR_i a_i."""
    assert len(args) == k + 1
    drop = [store.disj([args[j] for j in range(k + 1) if j != i])
            for i in range(k + 1)]
    big = store.disj([store.imp(args[i], drop[i]) for i in range(k + 1)])
    whole = store.disj(args)
    return store.imp(store.imp(big, whole), whole)


def _cpc_axioms(store: CircuitStore) -> list[AxiomSchema]:
    v = [store.var(f"?{i}") for i in range(3)]
    p, q, s = v
    mk = store
    ax = [
        ("a1", mk.imp(p, mk.imp(q, p))),
        ("a2", mk.imp(mk.imp(p, mk.imp(q, s)),
                      mk.imp(mk.imp(p, q), mk.imp(p, s)))),
        ("a3", mk.imp(mk.and_(p, q), p)),
        ("a4", mk.imp(mk.and_(p, q), q)),
        ("a5", mk.imp(p, mk.imp(q, mk.and_(p, q)))),
        ("a6", mk.imp(p, mk.or_(p, q))),
        ("a7", mk.imp(q, mk.or_(p, q))),
        ("a8", mk.imp(mk.imp(p, s),
                      mk.imp(mk.imp(q, s), mk.imp(mk.or_(p, q), s)))),
        ("efq", mk.imp(mk.bot(), p)),
        ("peirce", mk.imp(mk.imp(mk.imp(p, q), p), p)),
        ("top", mk.top()),
        ("notE", mk.imp(mk.neg(p), mk.imp(p, mk.bot()))),
        ("notI", mk.imp(mk.imp(p, mk.bot()), mk.neg(p))),
    ]
    return [AxiomSchema(i, n, "base") for i, n in ax]


def _ipc_axioms(store: CircuitStore) -> list[AxiomSchema]:
    keep = {"a1", "a2", "a3", "a4", "a5", "a6", "a7", "a8", "efq"}
    return [ax for ax in _cpc_axioms(store) if ax.schema_id in keep]


def build_registry(store: CircuitStore) -> dict[str, LogicSpec]:
    p = store.var("?0")
    cpc = _cpc_axioms(store)
    k_ax = AxiomSchema("k", store.imp(store.box(store.imp(p, store.var("?1"))),
                                      store.imp(store.box(p),
                                                store.box(store.var("?1")))),
                       "base")
    four = AxiomSchema("4", store.imp(store.box(p), store.box(store.box(p))),
                       "base")
    t_ax = AxiomSchema("t", store.imp(store.box(p), p), "refl2")
    gl_ax = AxiomSchema("gl", store.imp(
        store.box(store.imp(store.box(p), p)), store.box(p)), "irr1")
    grz_ax = AxiomSchema("grz", store.imp(
        store.box(store.imp(store.box(store.imp(p, store.box(p))), p)),
        store.box(p)), "other")

    def bb_schema(k: int) -> AxiomSchema:
        args = [store.var(f"?{i}") for i in range(k + 1)]
        return AxiomSchema(f"bb{k}", bounded_branching_axiom(store, k, args),
                           "bb")

    def tk_schema(k: int) -> AxiomSchema:
        args = [store.var(f"?{i}") for i in range(k + 1)]
        return AxiomSchema(f"tk{k}", tree_branching_axiom(store, k, args),
                           "other")

    reg: dict[str, LogicSpec] = {}

    def add(name: str, language: str, axioms, has_nec: bool,
            stars=(), branching=None, frame_class: str = "") -> None:
        reg[name] = LogicSpec(name, language, tuple(axioms), has_nec,
                              frozenset(stars), branching, frame_class)

    add("CPC", BOOLEAN, cpc, False, frame_class="point")
    add("K", MODAL, cpc + [k_ax], True, frame_class="all")
    add("K4", MODAL, cpc + [k_ax, four], True, stars=(IRR, REFL),
        frame_class="transitive")
    add("S4", MODAL, cpc + [k_ax, four, t_ax], True, stars=(REFL,),
        frame_class="reflexive")
    add("GL", MODAL, cpc + [k_ax, four, gl_ax], True, stars=(IRR,),
        frame_class="irreflexive")
    add("S4Grz", MODAL, cpc + [k_ax, four, t_ax, grz_ax], True,
        stars=(REFL,), frame_class="partial-order")

    for k in (1, 2, 3):
        bb = bb_schema(k)
        add(f"K4BB{k}", MODAL, cpc + [k_ax, four, bb], True,
            branching=k, frame_class=f"transitive-b{k}")
        add(f"S4BB{k}", MODAL, cpc + [k_ax, four, t_ax, bb], True,
            branching=k, frame_class=f"reflexive-b{k}")
        add(f"GLBB{k}", MODAL, cpc + [k_ax, four, gl_ax, bb], True,
            branching=k, frame_class=f"irreflexive-b{k}")
        add(f"S4GrzBB{k}", MODAL, cpc + [k_ax, four, t_ax, grz_ax, bb], True,
            branching=k, frame_class=f"partial-order-b{k}")

    add("IPC", INT, _ipc_axioms(store), False, frame_class="poset")
    for k in (1, 2, 3):
        add(f"T{k}", INT, _ipc_axioms(store) + [tk_schema(k)], False,
            branching=k, frame_class=f"tree-b{k}")
    return reg


def base_logic_of(logic: LogicSpec) -> str:
    """Name of the logic with the bounded-branching axiom removed."""
    if logic.branching is None:
        return logic.name
    k = logic.branching
    base = logic.name
    if logic.language == INT:
        return "IPC"
    assert base.endswith(f"BB{k}")
    return base[: -len(f"BB{k}")]


def bb_schema_id(logic: LogicSpec) -> str | None:
    if logic.branching is None or logic.language == INT:
        return None
    return f"bb{logic.branching}"


def sublogic_names(name: str) -> frozenset[str]:
    """Names of shipped logics whose theorems are included in ``name``'s.

    Used to accept axiom instances of a weaker shipped logic inside a
    proof over a stronger one (e.g. a K4 proof replayed in GLBB2).
    """
    order = {
        "CPC": {"CPC", "IPC"},
        "K": {"CPC", "IPC", "K"},
        "K4": {"CPC", "IPC", "K", "K4"},
        "S4": {"CPC", "IPC", "K", "K4", "S4"},
        "GL": {"CPC", "IPC", "K", "K4", "GL"},
        "S4Grz": {"CPC", "IPC", "K", "K4", "S4", "S4Grz"},
        "IPC": {"IPC"},
    }
    if name in order:
        return frozenset(order[name])
    if name.startswith("T"):
        return frozenset({"IPC", name})
    for k in (1, 2, 3):
        suffix = f"BB{k}"
        if name.endswith(suffix):
            base = name[: -len(suffix)]
            out = set(order[base]) | {name}
            out |= {b + suffix for b in order[base] if b not in ("K", "CPC")}
            return frozenset(out)
    raise KeyError(name)
