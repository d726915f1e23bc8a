"""File formats: proofs (S-expressions) and frames/models (JSON).

Proof files::

    (proof SYSTEM LOGIC)
    (premises CIRCUIT ...)            ; optional
    (line N CIRCUIT JUSTIFICATION)    ; N counts from 0 upward

with justifications ``(prem I)``, ``(ax SCHEMA ((NAME CIRCUIT) ...))``,
``(mp I J)`` (J is the implication), ``(nec I)``, ``(ext QVAR CIRCUIT)``,
``(subst I ((NAME CIRCUIT) ...))``, ``(ceq I)``.

Frame files are JSON: {"points": n, "rel": [[i,j],...], "reflexive":
[i,...]}; models add {"val": {"p": [i,...]}}.
"""

from __future__ import annotations

import json

from .circuits import CircuitStore
from .frames import KripkeFrame, frame_from_pairs
from .logics import LogicSpec
from .proofs import Proof
from .semantics import Model
from .sexpr import (SexprError, circuit_from_tree, parse_many,
                    print_circuit)


def _subst_to_tree(store: CircuitStore, sigma: dict[int, int]) -> str:
    items = sorted(sigma.items(), key=lambda kv: store.var_name(kv[0]))
    inner = " ".join(f"({store.var_name(v)} {print_circuit(store, c)})"
                     for v, c in items)
    return f"({inner})"


def _subst_from_tree(store: CircuitStore, tree) -> dict[int, int]:
    if not isinstance(tree, list):
        raise SexprError("substitution must be a list of (NAME CIRCUIT)")
    sigma = {}
    for entry in tree:
        if not (isinstance(entry, list) and len(entry) == 2
                and isinstance(entry[0], str)):
            raise SexprError(f"bad substitution entry {entry!r}")
        sigma[store.var(entry[0])] = circuit_from_tree(store, entry[1])
    return sigma


def print_proof(store: CircuitStore, proof: Proof) -> str:
    out = [f"(proof {proof.system} {proof.logic.name})"]
    if proof.premises:
        prems = " ".join(print_circuit(store, p) for p in proof.premises)
        out.append(f"(premises {prems})")
    for i, (circ, just) in enumerate(proof.lines):
        kind = just[0]
        if kind == "prem":
            j = f"(prem {just[1]})"
        elif kind == "ax":
            j = f"(ax {just[1]} {_subst_to_tree(store, just[2])})"
        elif kind == "mp":
            j = f"(mp {just[1]} {just[2]})"
        elif kind == "nec":
            j = f"(nec {just[1]})"
        elif kind == "ext":
            j = (f"(ext {store.var_name(just[1])} "
                 f"{print_circuit(store, just[2])})")
        elif kind == "subst":
            j = f"(subst {just[1]} {_subst_to_tree(store, just[2])})"
        elif kind == "ceq":
            j = f"(ceq {just[1]})"
        else:
            raise ValueError(f"unknown justification {kind}")
        out.append(f"(line {i} {print_circuit(store, circ)} {j})")
    return "\n".join(out) + "\n"


def parse_proof(store: CircuitStore, registry: dict[str, LogicSpec],
                text: str) -> Proof:
    trees = parse_many(text)
    if not trees or trees[0][0] != "proof" or len(trees[0]) != 3:
        raise SexprError("missing (proof SYSTEM LOGIC) header")
    system, logic_name = trees[0][1], trees[0][2]
    if logic_name not in registry:
        raise SexprError(f"unknown logic {logic_name}")
    logic = registry[logic_name]
    premises: list[int] = []
    lines: list[tuple[int, tuple]] = []
    for tree in trees[1:]:
        if not isinstance(tree, list) or not tree:
            raise SexprError(f"bad toplevel form {tree!r}")
        if tree[0] == "premises":
            premises = [circuit_from_tree(store, t) for t in tree[1:]]
        elif tree[0] == "line":
            if len(tree) != 4:
                raise SexprError(f"bad line {tree!r}")
            n = int(tree[1])
            if n != len(lines):
                raise SexprError(f"line number {n} out of order")
            circ = circuit_from_tree(store, tree[2])
            lines.append((circ, _parse_just(store, tree[3])))
        else:
            raise SexprError(f"unknown form {tree[0]!r}")
    return Proof(system, logic, premises, lines)


def _parse_just(store: CircuitStore, tree) -> tuple:
    if not isinstance(tree, list) or not tree:
        raise SexprError(f"bad justification {tree!r}")
    kind = tree[0]
    if kind == "prem" and len(tree) == 2:
        return ("prem", int(tree[1]))
    if kind == "ax" and len(tree) == 3:
        return ("ax", tree[1], _subst_from_tree(store, tree[2]))
    if kind == "mp" and len(tree) == 3:
        return ("mp", int(tree[1]), int(tree[2]))
    if kind == "nec" and len(tree) == 2:
        return ("nec", int(tree[1]))
    if kind == "ext" and len(tree) == 3:
        return ("ext", store.var(tree[1]), circuit_from_tree(store, tree[2]))
    if kind == "subst" and len(tree) == 3:
        return ("subst", int(tree[1]), _subst_from_tree(store, tree[2]))
    if kind == "ceq" and len(tree) == 2:
        return ("ceq", int(tree[1]))
    raise SexprError(f"bad justification {tree!r}")


# -- frames and models -------------------------------------------------------

def frame_to_json(frame: KripkeFrame) -> dict:
    rel = [[i, j] for i in range(frame.n) for j in range(frame.n)
           if i != j and frame.sees(i, j)]
    refl = [i for i in range(frame.n) if frame.reflexive(i)]
    return {"points": frame.n, "rel": rel, "reflexive": refl}


def frame_from_json(data: dict) -> KripkeFrame:
    return frame_from_pairs(data["points"],
                            [tuple(p) for p in data["rel"]],
                            data.get("reflexive", ()))


def model_to_json(model: Model) -> dict:
    data = frame_to_json(model.frame)
    data["val"] = {name: [i for i in range(model.frame.n) if mask >> i & 1]
                   for name, mask in sorted(model.val.items())}
    return data


def model_from_json(data: dict) -> Model:
    frame = frame_from_json(data)
    val = {name: sum(1 << i for i in pts)
           for name, pts in data.get("val", {}).items()}
    return Model(frame, val)


def dump_frame(frame: KripkeFrame) -> str:
    return json.dumps(frame_to_json(frame), sort_keys=True)


def load_frame(text: str) -> KripkeFrame:
    return frame_from_json(json.loads(text))
