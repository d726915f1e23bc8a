"""Satisfaction, frame validity, QBF evaluation, and the brute-force
provability oracle.

Validity checks enumerate every valuation at once using big-integer
bitmasks: one mask per (subcircuit, point), with bit a set when the
subcircuit holds at the point under valuation number a.  This keeps the
exhaustive checks comfortably inside the acceptance-time budgets
without leaving pure Python.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .circuits import (CircuitStore, INT, MODAL, lang_ok, subcircuits,
                       substitute, variables, QbfFormula, EXISTS, FORALL)
from .frames import (KripkeFrame, branching, build_fork, clusters,
                     enumerate_frames_upto, enumerate_trees,
                     has_proper_cluster, is_poset)
from .logics import LogicSpec, schema_vars

DEFAULT_VALUATION_BUDGET = 24
DEFAULT_FRAME_BUDGET = 5
DEFAULT_QBF_BUDGET = 20


class BudgetExceeded(Exception):
    pass


@dataclass
class Model:
    frame: KripkeFrame
    val: dict[str, int]    # variable name -> bitmask of points

    def __post_init__(self) -> None:
        full = (1 << self.frame.n) - 1
        assert all(0 <= m <= full for m in self.val.values())


def satisfies(store: CircuitStore, model: Model, x: int, phi: int) -> bool:
    return bool(truth_mask(store, model, phi) >> x & 1)


def truth_mask(store: CircuitStore, model: Model, phi: int,
               memo: dict[int, int] | None = None) -> int:
    """Bitmask of points where phi holds (classical modal clauses)."""
    frame = model.frame
    full = (1 << frame.n) - 1
    if memo is None:
        memo = {}
    for s in subcircuits(store, phi):
        if s in memo:
            continue
        tag = store.tag(s)
        if tag == "var":
            name = store.var_name(s)
            if name not in model.val:
                raise ValueError(f"unvalued variable {name}")
            memo[s] = model.val[name]
        elif tag == "top":
            memo[s] = full
        elif tag == "bot":
            memo[s] = 0
        elif tag == "not":
            memo[s] = ~memo[store.children(s)[0]] & full
        elif tag == "and":
            a, b = store.children(s)
            memo[s] = memo[a] & memo[b]
        elif tag == "or":
            a, b = store.children(s)
            memo[s] = memo[a] | memo[b]
        elif tag == "imp":
            a, b = store.children(s)
            memo[s] = (~memo[a] | memo[b]) & full
        else:  # box
            child = memo[store.children(s)[0]]
            m = 0
            for i in range(frame.n):
                if frame.succ[i] & ~child == 0:
                    m |= 1 << i
            memo[s] = m
    return memo[phi]


def int_truth_mask(store: CircuitStore, model: Model, phi: int) -> int:
    """Upward-closed truth sets for intuitionistic satisfaction on a
    poset frame with monotone valuation."""
    frame = model.frame
    full = (1 << frame.n) - 1
    memo: dict[int, int] = {}
    for s in subcircuits(store, phi):
        tag = store.tag(s)
        if tag == "var":
            name = store.var_name(s)
            mask = model.val[name]
            for i in range(frame.n):
                if mask >> i & 1:
                    assert frame.succ[i] & ~mask == 0, \
                        f"valuation of {name} is not monotone"
            memo[s] = mask
        elif tag == "bot":
            memo[s] = 0
        elif tag == "and":
            a, b = store.children(s)
            memo[s] = memo[a] & memo[b]
        elif tag == "or":
            a, b = store.children(s)
            memo[s] = memo[a] | memo[b]
        elif tag == "imp":
            a, b = store.children(s)
            bad = memo[a] & ~memo[b]
            m = 0
            for i in range(frame.n):
                if frame.up_incl(i) & bad == 0:
                    m |= 1 << i
            memo[s] = m
        else:
            raise ValueError(f"not intuitionistic: {tag}")
    return memo[phi]


def _vectored_validity(store: CircuitStore, frame: KripkeFrame, phi: int,
                       budget: int, chunk_bits: int = 20
                       ) -> Optional[tuple[dict[str, int], int]]:
    """None if phi holds at every point under every valuation; otherwise
    a (valuation, point) witness of failure.

    Valuations are enumerated in blocks; within a block every valuation
    is evaluated simultaneously via per-(subcircuit, point) masks whose
    bit a is the truth value under block-local valuation a.
    """
    names = variables(store, phi)
    n = frame.n
    total_bits = len(names) * n
    if total_bits > budget:
        raise BudgetExceeded(f"{total_bits} valuation bits > budget {budget}")
    order = subcircuits(store, phi)

    free = max(0, total_bits - chunk_bits)
    block_bits = total_bits - free
    ones = (1 << (1 << block_bits)) - 1

    # bit layout: valuation index a;  bit (v * n + i) of a  ==  var v at point i
    var_masks = [_alternating(block_bits, bit) for bit in range(block_bits)]

    for high in range(1 << free):
        memo: dict[int, list[int]] = {}
        for s in order:
            tag = store.tag(s)
            if tag == "var":
                v = names.index(store.var_name(s))
                row = []
                for i in range(n):
                    bit = v * n + i
                    if bit < block_bits:
                        row.append(var_masks[bit])
                    else:
                        row.append(ones if (high >> (bit - block_bits)) & 1 else 0)
                memo[s] = row
            elif tag == "top":
                memo[s] = [ones] * n
            elif tag == "bot":
                memo[s] = [0] * n
            elif tag == "not":
                c = memo[store.children(s)[0]]
                memo[s] = [~x & ones for x in c]
            elif tag == "and":
                a, b = (memo[c] for c in store.children(s))
                memo[s] = [x & y for x, y in zip(a, b)]
            elif tag == "or":
                a, b = (memo[c] for c in store.children(s))
                memo[s] = [x | y for x, y in zip(a, b)]
            elif tag == "imp":
                a, b = (memo[c] for c in store.children(s))
                memo[s] = [(~x | y) & ones for x, y in zip(a, b)]
            else:  # box
                c = memo[store.children(s)[0]]
                row = []
                for i in range(n):
                    acc = ones
                    rest, j = frame.succ[i], 0
                    while rest:
                        if rest & 1:
                            acc &= c[j]
                        rest >>= 1
                        j += 1
                    row.append(acc)
                memo[s] = row
        result = memo[phi]
        for i in range(n):
            if result[i] != ones:
                a = _lowest_zero(result[i], 1 << block_bits)
                val = {}
                for v, name in enumerate(names):
                    mask = 0
                    for pt in range(n):
                        bit = v * n + pt
                        if bit < block_bits:
                            if a >> bit & 1:
                                mask |= 1 << pt
                        elif high >> (bit - block_bits) & 1:
                            mask |= 1 << pt
                    val[name] = mask
                return val, i
    return None


def _alternating(block_bits: int, bit: int) -> int:
    period = 1 << bit
    unit = (1 << period) - 1
    pattern = 0
    pos = period
    step = 2 * period
    width = 1 << block_bits
    while pos < width:
        pattern |= unit << pos
        pos += step
    return pattern


def _lowest_zero(mask: int, width: int) -> int:
    for a in range(width):
        if not (mask >> a & 1):
            return a
    raise AssertionError("no zero bit")


def frame_validates(store: CircuitStore, frame: KripkeFrame, phi: int,
                    budget: int = DEFAULT_VALUATION_BUDGET) -> bool:
    return _vectored_validity(store, frame, phi, budget) is None


def frame_countermodel(store: CircuitStore, frame: KripkeFrame, phi: int,
                       budget: int = DEFAULT_VALUATION_BUDGET
                       ) -> Optional[tuple[Model, int]]:
    out = _vectored_validity(store, frame, phi, budget)
    if out is None:
        return None
    val, point = out
    return Model(frame, val), point


def int_frame_validates(store: CircuitStore, frame: KripkeFrame, phi: int,
                        budget: int = DEFAULT_VALUATION_BUDGET
                        ) -> Optional[tuple[Model, int]]:
    """None when valid; else a countermodel.  Enumerates monotone
    valuations (tuples of upward-closed sets)."""
    assert is_poset(frame)
    names = variables(store, phi)
    ups = upsets(frame)
    if len(ups) ** len(names) > (1 << budget):
        raise BudgetExceeded("too many monotone valuations")
    for combo in itertools.product(ups, repeat=len(names)):
        model = Model(frame, dict(zip(names, combo)))
        mask = int_truth_mask(store, model, phi)
        if mask != (1 << frame.n) - 1:
            return model, _lowest_zero(mask, frame.n)
    return None


def upsets(frame: KripkeFrame) -> list[int]:
    out = []
    for mask in range(1 << frame.n):
        ok = True
        for i in range(frame.n):
            if mask >> i & 1 and frame.succ[i] & ~mask:
                ok = False
                break
        if ok:
            out.append(mask)
    return out


# -- QBF evaluation ---------------------------------------------------------

def qbf_eval(store: CircuitStore, phi: QbfFormula,
             assignment: dict[str, bool] | None = None,
             budget: int = DEFAULT_QBF_BUDGET) -> bool:
    if len(phi.prefix) > budget:
        raise BudgetExceeded(f"{len(phi.prefix)} quantifiers > budget {budget}")
    env: dict[str, bool] = {}
    for v in phi.free_vars:
        name = store.var_name(v)
        if assignment is None or name not in assignment:
            raise ValueError(f"free variable {name} unassigned")
        env[name] = assignment[name]

    def matrix_value(env_: dict[str, bool]) -> bool:
        memo: dict[int, bool] = {}
        for s in subcircuits(store, phi.matrix):
            tag = store.tag(s)
            if tag == "var":
                memo[s] = env_[store.var_name(s)]
            elif tag == "top":
                memo[s] = True
            elif tag == "bot":
                memo[s] = False
            elif tag == "not":
                memo[s] = not memo[store.children(s)[0]]
            elif tag == "and":
                a, b = store.children(s)
                memo[s] = memo[a] and memo[b]
            elif tag == "or":
                a, b = store.children(s)
                memo[s] = memo[a] or memo[b]
            elif tag == "imp":
                a, b = store.children(s)
                memo[s] = (not memo[a]) or memo[b]
            else:
                raise ValueError("boxes have no place in a QBF matrix")
        return memo[phi.matrix]

    def recur(i: int, env_: dict[str, bool]) -> bool:
        if i == len(phi.prefix):
            return matrix_value(env_)
        quant, v = phi.prefix[i]
        name = store.var_name(v)
        results = (recur(i + 1, {**env_, name: b}) for b in (False, True))
        return any(results) if quant == EXISTS else all(results)

    return recur(0, env)


# -- provability oracle ------------------------------------------------------

@dataclass(frozen=True)
class OracleVerdict:
    status: str                       # "provable" | "refuted" | "unknown"
    countermodel: Optional[tuple[Model, int]] = None
    proof: object = None
    detail: str = ""

    @property
    def provable(self) -> bool:
        return self.status == "provable"

    @property
    def refuted(self) -> bool:
        return self.status == "refuted"


FRAME_CONDITIONS = {
    "transitive": lambda f: True,
    "reflexive": lambda f: all(f.reflexive(i) for i in range(f.n)),
    "irreflexive": lambda f: not any(f.reflexive(i) for i in range(f.n)),
    "partial-order": is_poset,
    "poset": is_poset,
}


def frame_condition(frame_class: str):
    if frame_class in FRAME_CONDITIONS:
        return FRAME_CONDITIONS[frame_class]
    base, _, bk = frame_class.rpartition("-b")
    if bk.isdigit():
        inner = frame_condition(base if base in FRAME_CONDITIONS else base)
        k = int(bk)
        return lambda f: inner(f) and branching(f) <= k
    raise KeyError(frame_class)


def tautology(store: CircuitStore, phi: int) -> bool:
    """Classical truth-table validity of a box-free circuit."""
    point = KripkeFrame(1, (0,))
    return frame_validates(store, point, phi, budget=DEFAULT_VALUATION_BUDGET)


def provability_oracle(store: CircuitStore, logic: LogicSpec, phi: int,
                       frame_budget: int = DEFAULT_FRAME_BUDGET,
                       valuation_budget: int = DEFAULT_VALUATION_BUDGET,
                       search: bool = True) -> OracleVerdict:
    """Search L-frames up to the budget for a countermodel; absent one,
    run a bounded saturation proof search.  Verdicts are never wrong:
    refutations carry a countermodel over an L-frame, provability
    carries a checker-accepted proof."""
    if logic.name == "CPC":
        if tautology(store, phi):
            proof = _cpc_proof(store, logic, phi)
            return OracleVerdict("provable", proof=proof)
        point = KripkeFrame(1, (0,))
        return OracleVerdict("refuted",
                             countermodel=frame_countermodel(store, point, phi))

    if logic.language == INT:
        if logic.branching is None:
            frames = [f for n in range(1, frame_budget + 1)
                      for f in enumerate_trees(n, None, True)]
        else:
            frames = [f for n in range(1, frame_budget + 1)
                      for f in enumerate_trees(n, logic.branching, True)]
        for f in frames:
            try:
                out = int_frame_validates(store, f, phi, valuation_budget)
            except BudgetExceeded:
                return OracleVerdict("unknown", detail="valuation budget")
            if out is not None:
                return OracleVerdict("refuted", countermodel=out)
    else:
        try:
            cond = frame_condition(logic.frame_class)
        except KeyError:
            raise ValueError(f"logic {logic.name} unsupported by the oracle")
        for f in enumerate_frames_upto(frame_budget, rooted=True):
            if not cond(f):
                continue
            try:
                out = frame_countermodel(store, f, phi, valuation_budget)
            except BudgetExceeded:
                return OracleVerdict("unknown", detail="valuation budget")
            if out is not None:
                return OracleVerdict("refuted", countermodel=out)

    if search:
        proof = saturation_search(store, logic, phi)
        if proof is not None:
            return OracleVerdict("provable", proof=proof)
    return OracleVerdict("unknown", detail="no countermodel within budget; "
                                           "proof search gave up")


def _cpc_proof(store: CircuitStore, logic: LogicSpec, phi: int):
    from .templates import prove_classical
    return prove_classical(store, logic, phi)


def saturation_search(store: CircuitStore, logic: LogicSpec, phi: int,
                      rounds: int = 4, cap: int = 4000):
    """Bounded saturation: instantiate axiom schemata over the
    subcircuits of phi, close under modus ponens (and necessitation
    into the candidate set), and reconstruct a proof if phi is reached."""
    from .proofs import Proof, check_proof

    candidates = list(subcircuits(store, phi))
    cand_set = set(candidates)
    derived: dict[int, tuple] = {}
    order: list[int] = []

    def add(circ: int, just: tuple) -> None:
        if circ not in derived:
            derived[circ] = just
            order.append(circ)

    for ax in logic.axioms:
        holes = schema_vars(store, ax.pattern)
        if len(holes) > 2 and len(candidates) > 12:
            continue
        for combo in itertools.product(candidates, repeat=len(holes)):
            if len(derived) > cap:
                break
            sigma = dict(zip(holes, combo))
            inst = substitute(store, sigma, ax.pattern)
            if not lang_ok(store, inst, logic.language):
                continue
            add(inst, ("ax", ax.schema_id, sigma))

    for _ in range(rounds):
        if phi in derived:
            break
        snapshot = list(order)
        for a in snapshot:
            node = store.nodes[a]
            if node[0] == "imp" and node[1] in derived:
                add(node[2], ("mp", node[1], a))
        if logic.has_nec:
            for a in snapshot:
                b = store.box(a)
                if b in cand_set:
                    add(b, ("nec", a))

    if phi not in derived:
        return None

    # reconstruct: walk dependencies of phi
    need: list[int] = []
    seen: set[int] = set()

    def visit(c: int) -> None:
        if c in seen:
            return
        seen.add(c)
        just = derived[c]
        if just[0] == "mp":
            visit(just[1])
            visit(just[2])
        elif just[0] == "nec":
            visit(just[1])
        need.append(c)

    visit(phi)
    index = {c: i for i, c in enumerate(need)}
    lines = []
    for c in need:
        just = derived[c]
        if just[0] == "mp":
            lines.append((c, ("mp", index[just[1]], index[just[2]])))
        elif just[0] == "nec":
            lines.append((c, ("nec", index[just[1]])))
        else:
            lines.append((c, just))
    proof = Proof("CF", logic, [], lines)
    if check_proof(store, proof) is not None:
        return None
    return proof
