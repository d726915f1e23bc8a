"""Checkable proof objects for the five Hilbert-style systems.

Systems: F (formulas), EF (F + extension axioms), CF (circuits + an
identity rule for circuits representing the same formula), SF (F + the
substitution rule), SCF (CF + the substitution rule).

A proof is a sequence of justified lines over one logic; the checker
validates every justification and nothing else is trusted.  All
generators in this package must produce proofs this checker accepts.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .circuits import (CircuitStore, EXT_PREFIX, dag_size, lang_ok,
                       same_formula, subcircuits, substitute, variables)
from .logics import SCHEMA_PREFIX, LogicSpec, schema_vars, sublogic_names

SYSTEMS = ("F", "EF", "CF", "SF", "SCF")
FORMULA_SYSTEMS = frozenset({"F", "EF", "SF"})
CIRCUIT_SYSTEMS = frozenset({"CF", "SCF"})
SUBST_SYSTEMS = frozenset({"SF", "SCF"})


@dataclass(frozen=True)
class CheckError:
    line: int
    reason: str

    def __str__(self) -> str:
        return f"line {self.line}: {self.reason}"


class ProofError(Exception):
    pass


@dataclass
class Proof:
    system: str
    logic: LogicSpec
    premises: list[int]
    lines: list[tuple[int, tuple]]   # (circuit, justification)

    @property
    def conclusion(self) -> int:
        return self.lines[-1][0]

    def circuits(self) -> list[int]:
        return [c for c, _ in self.lines]


def _vars_of(store: CircuitStore, nid: int) -> set[str]:
    return set(variables(store, nid))


def _is_schema_free(store: CircuitStore, nid: int) -> bool:
    return not any(store.is_var(s) and store.var_name(s).startswith(SCHEMA_PREFIX)
                   for s in subcircuits(store, nid))


def schema_match(store: CircuitStore, pattern: int, target: int
                 ) -> Optional[dict[int, int]]:
    """Most general matcher of a target circuit against a schema pattern
    (syntactic, on DAG structure); None if the shapes disagree."""
    binding: dict[int, int] = {}
    memo: set[tuple[int, int]] = set()

    def walk(p: int, t: int) -> bool:
        if (p, t) in memo:
            return True
        if store.is_var(p) and store.var_name(p).startswith(SCHEMA_PREFIX):
            if p in binding:
                return binding[p] == t
            binding[p] = t
            return True
        np, nt = store.nodes[p], store.nodes[t]
        if np[0] != nt[0]:
            return False
        if np[0] == "var":
            return np[1] == nt[1]
        if not all(walk(cp, ct) for cp, ct in zip(np[1:], nt[1:])):
            return False
        memo.add((p, t))
        return True

    return binding if walk(pattern, target) else None


def check_proof(store: CircuitStore, proof: Proof,
                conclusion: int | None = None) -> Optional[CheckError]:
    """Validate every line; None means the proof is accepted."""
    if proof.system not in SYSTEMS:
        return CheckError(-1, f"unknown system {proof.system}")
    logic = proof.logic
    if proof.system in SUBST_SYSTEMS and proof.premises:
        return CheckError(-1, f"{proof.system} proofs take no premises")
    if not proof.lines:
        return CheckError(-1, "empty proof")
    for p in proof.premises:
        if not lang_ok(store, p, logic.language):
            return CheckError(-1, "premise outside the logic's language")

    final = proof.lines[-1][0]
    used_vars: set[str] = set()
    for p in proof.premises:
        used_vars |= _vars_of(store, p)
    used_vars |= _vars_of(store, final)

    circuits: list[int] = []
    for idx, (circ, just) in enumerate(proof.lines):
        err = _check_line(store, proof, idx, circ, just, circuits,
                          final, used_vars)
        if err is not None:
            return err
        circuits.append(circ)
        used_vars |= _vars_of(store, circ)

    if conclusion is not None and final != conclusion:
        return CheckError(len(proof.lines) - 1,
                          "last line is not the claimed conclusion")
    return None


def _check_line(store: CircuitStore, proof: Proof, idx: int, circ: int,
                just: tuple, circuits: list[int], final: int,
                used_vars: set[str]) -> Optional[CheckError]:
    logic = proof.logic
    if not lang_ok(store, circ, logic.language):
        return CheckError(idx, "circuit outside the logic's language")
    if not _is_schema_free(store, circ):
        return CheckError(idx, "schema variables may not occur in proof lines")
    kind = just[0]

    def cited(i) -> Optional[int]:
        if not isinstance(i, int) or not (0 <= i < idx):
            return None
        return circuits[i]

    if kind == "prem":
        (_, i) = just
        if not isinstance(i, int) or not (0 <= i < len(proof.premises)):
            return CheckError(idx, "premise index out of range")
        if proof.premises[i] != circ:
            return CheckError(idx, "premise mismatch")
        return None

    if kind == "ax":
        (_, schema_id, sigma) = just
        if not logic.has_axiom(schema_id):
            return CheckError(idx, f"{logic.name} has no axiom {schema_id}")
        pattern = logic.axiom(schema_id).pattern
        holes = schema_vars(store, pattern)
        if set(sigma) != set(holes):
            return CheckError(idx, "substitution must cover the schema variables")
        for v, val in sigma.items():
            if not _is_schema_free(store, val):
                return CheckError(idx, "schema variable inside instance")
            if not lang_ok(store, val, logic.language):
                return CheckError(idx, "instance outside the logic's language")
        if substitute(store, dict(sigma), pattern) != circ:
            return CheckError(idx, f"not an instance of {schema_id}")
        return None

    if kind == "mp":
        (_, i, j) = just
        a, b = cited(i), cited(j)
        if a is None or b is None:
            return CheckError(idx, "modus ponens cites a bad index")
        if store.nodes[b] != ("imp", a, circ):
            return CheckError(idx, "modus ponens shape mismatch")
        return None

    if kind == "nec":
        if not logic.has_nec:
            return CheckError(idx, f"{logic.name} has no necessitation")
        (_, i) = just
        a = cited(i)
        if a is None:
            return CheckError(idx, "necessitation cites a bad index")
        if store.nodes[circ] != ("box", a):
            return CheckError(idx, "necessitation premise mismatch")
        return None

    if kind == "ext":
        if proof.system != "EF":
            return CheckError(idx, "extension axioms only in EF")
        (_, q, psi) = just
        if not store.is_var(q):
            return CheckError(idx, "extension variable must be a variable")
        qname = store.var_name(q)
        if not qname.startswith(EXT_PREFIX):
            return CheckError(idx, "extension variable outside the reserved namespace")
        if circ != store.iff(q, psi):
            return CheckError(idx, "extension axiom shape mismatch")
        if qname in used_vars or qname in _vars_of(store, psi):
            return CheckError(idx, f"extension variable {qname} is not fresh")
        return None

    if kind == "subst":
        if proof.system not in SUBST_SYSTEMS:
            return CheckError(idx, f"substitution rule unavailable in {proof.system}")
        (_, i, sigma) = just
        a = cited(i)
        if a is None:
            return CheckError(idx, "substitution cites a bad index")
        for v, val in sigma.items():
            if not store.is_var(v) or store.var_name(v).startswith(SCHEMA_PREFIX):
                return CheckError(idx, "substitution keys must be plain variables")
            if not lang_ok(store, val, logic.language) or not _is_schema_free(store, val):
                return CheckError(idx, "substitution image is malformed")
        if substitute(store, dict(sigma), a) != circ:
            return CheckError(idx, "substitution result mismatch")
        return None

    if kind == "ceq":
        if proof.system not in CIRCUIT_SYSTEMS:
            return CheckError(idx, f"circuit identity rule unavailable in {proof.system}")
        (_, i) = just
        a = cited(i)
        if a is None:
            return CheckError(idx, "circuit identity cites a bad index")
        if not same_formula(store, a, circ):
            return CheckError(idx, "circuits represent different formulas")
        return None

    return CheckError(idx, f"unknown justification {kind!r}")


def assert_valid(store: CircuitStore, proof: Proof,
                 conclusion: int | None = None) -> Proof:
    err = check_proof(store, proof, conclusion)
    if err is not None:
        raise ProofError(str(err))
    return proof


def metrics(store: CircuitStore, proof: Proof) -> tuple[int, int]:
    """(size, number of lines); size is per-line tree size for the
    formula systems and per-line distinct-node count for the circuit
    systems."""
    if proof.system in FORMULA_SYSTEMS:
        size = sum(store.tree_size(c) for c, _ in proof.lines)
    else:
        size = sum(dag_size(store, c) for c, _ in proof.lines)
    return size, len(proof.lines)


def instantiate_proof(store: CircuitStore, proof: Proof,
                      sigma: dict[int, int]) -> Proof:
    """Line-wise substitution into a proof; preserves the line count.

    Rejected when the proof contains extension axioms the substitution
    could disturb.
    """
    ext_vars = {store.var_name(just[1]) for _, just in proof.lines
                if just[0] == "ext"}
    if ext_vars:
        touched = {store.var_name(v) for v in sigma}
        for val in sigma.values():
            touched |= _vars_of(store, val)
        if touched & ext_vars:
            raise ProofError("substitution hits an extension variable")

    def apply(nid: int) -> int:
        return substitute(store, sigma, nid)

    def compose(tau: dict[int, int]) -> dict[int, int]:
        out = {v: apply(t) for v, t in tau.items()}
        for v in sigma:
            if v not in tau:
                out[v] = sigma[v]
        return out

    new_premises = [apply(p) for p in proof.premises]
    new_lines: list[tuple[int, tuple]] = []
    for circ, just in proof.lines:
        kind = just[0]
        if kind == "ax":
            new_just = ("ax", just[1], {v: apply(t) for v, t in just[2].items()})
        elif kind == "subst":
            new_just = ("subst", just[1], compose(just[2]))
        else:
            new_just = just
        new_lines.append((apply(circ), new_just))
    return Proof(proof.system, proof.logic, new_premises, new_lines)


class ProofBuilder:
    """Incremental proof assembly with line deduplication.

    ``add`` returns the index of an existing identical line when one is
    already present with a valid justification, so generators can reuse
    intermediate results freely.
    """

    def __init__(self, store: CircuitStore, system: str, logic: LogicSpec,
                 premises: list[int] | None = None) -> None:
        self.store = store
        self.system = system
        self.logic = logic
        self.premises = list(premises or [])
        self.lines: list[tuple[int, tuple]] = []
        self._by_circuit: dict[int, int] = {}

    def _push(self, circ: int, just: tuple) -> int:
        known = self._by_circuit.get(circ)
        if known is not None:
            return known
        self.lines.append((circ, just))
        idx = len(self.lines) - 1
        self._by_circuit[circ] = idx
        return idx

    def have(self, circ: int) -> int | None:
        return self._by_circuit.get(circ)

    def premise(self, i: int) -> int:
        return self._push(self.premises[i], ("prem", i))

    def axiom(self, schema_id: str, sigma: dict[int, int]) -> int:
        pattern = self.logic.axiom(schema_id).pattern
        circ = substitute(self.store, sigma, pattern)
        return self._push(circ, ("ax", schema_id, dict(sigma)))

    def ax(self, schema_id: str, *args: int) -> int:
        """Axiom instance with holes filled positionally (?0, ?1, ...)."""
        sigma = {self.store.var(f"{SCHEMA_PREFIX}{i}"): a
                 for i, a in enumerate(args)}
        pattern = self.logic.axiom(schema_id).pattern
        holes = schema_vars(self.store, pattern)
        assert len(args) == len(set(holes)), (schema_id, len(args))
        return self.axiom(schema_id, sigma)

    def mp(self, i: int, j: int) -> int:
        imp = self.store.nodes[self.lines[j][0]]
        assert imp[0] == "imp" and imp[1] == self.lines[i][0], "mp shape"
        return self._push(imp[2], ("mp", i, j))

    def mp_for(self, antecedent_idx: int, implication_idx: int) -> int:
        return self.mp(antecedent_idx, implication_idx)

    def nec(self, i: int) -> int:
        return self._push(self.store.box(self.lines[i][0]), ("nec", i))

    def subst(self, i: int, sigma: dict[int, int]) -> int:
        circ = substitute(self.store, sigma, self.lines[i][0])
        return self._push(circ, ("subst", i, dict(sigma)))

    def ceq(self, i: int, circ: int) -> int:
        assert same_formula(self.store, self.lines[i][0], circ)
        return self._push(circ, ("ceq", i))

    def ext(self, q: int, psi: int) -> int:
        return self._push(self.store.iff(q, psi), ("ext", q, psi))

    def copy_from(self, other: "Proof") -> int:
        """Append all lines of a premise-free proof over the same (or a
        weaker shipped) logic; returns the index of its last line."""
        assert not other.premises
        assert other.logic.name in sublogic_names(self.logic.name), \
            (other.logic.name, self.logic.name)
        offset_map: dict[int, int] = {}
        last = -1
        for pos, (circ, just) in enumerate(other.lines):
            kind = just[0]
            if kind == "mp":
                just = ("mp", offset_map[just[1]], offset_map[just[2]])
            elif kind in ("nec", "ceq"):
                just = (kind, offset_map[just[1]])
            elif kind == "subst":
                just = ("subst", offset_map[just[1]], just[2])
            known = self._by_circuit.get(circ)
            if known is not None:
                offset_map[pos] = known
                last = known
                continue
            self.lines.append((circ, just))
            idx = len(self.lines) - 1
            self._by_circuit[circ] = idx
            offset_map[pos] = idx
            last = idx
        assert last >= 0
        return last

    def conclude(self, line: int) -> int:
        """Make the given derived line the final line of the proof,
        repeating its justification if other lines came after it."""
        circ, just = self.lines[line]
        if self.lines[-1][0] == circ:
            return len(self.lines) - 1
        assert just[0] != "ext", "cannot repeat an extension axiom"
        self.lines.append((circ, just))
        return len(self.lines) - 1

    def build(self) -> Proof:
        return Proof(self.system, self.logic, self.premises, self.lines)

    def circuit(self, i: int) -> int:
        return self.lines[i][0]
