"""The session's system state and the operators that move it.

A state holds ground rules R, input atoms I disjoint from head(R), a
three-valued assignment i over I (true / open / false-by-default), and a
partial two-valued assignment j over all atoms (assumptions). Operators are
pure: each returns a new state, and every guarded misuse (unknown input,
non-compositional define, re-declared head) degrades to the identity so
callers can detect no-ops by comparing states.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Sequence

from .syntax import (
    Atom,
    Literal,
    Program,
    Rule,
    atom_key,
    head_atoms,
)


@dataclass(frozen=True)
class SystemState:
    rules: tuple[Rule, ...] = ()
    inputs: frozenset[Atom] = frozenset()
    i_true: frozenset[Atom] = frozenset()
    i_open: frozenset[Atom] = frozenset()
    j_true: frozenset[Atom] = frozenset()
    j_false: frozenset[Atom] = frozenset()
    shows: frozenset[tuple[str, int]] = frozenset()
    released: frozenset[Atom] = frozenset()
    fresh: int = 0

    def head_atoms(self) -> frozenset[Atom]:
        return head_atoms(self.rules)

    def i_value(self, atom: Atom) -> str:
        """t / u / f over I; atoms outside I have no i-value."""
        if atom not in self.inputs:
            raise KeyError(f"{atom} is not an input atom")
        if atom in self.i_true:
            return "t"
        if atom in self.i_open:
            return "u"
        return "f"

    def j_value(self, atom: Atom) -> str:
        if atom in self.j_true:
            return "t"
        if atom in self.j_false:
            return "f"
        return "u"

    def check_invariants(self) -> None:
        heads = self.head_atoms()
        assert not (self.inputs & heads), "inputs intersect rule heads"
        assert self.i_true <= self.inputs, "i assigns atoms outside I"
        assert self.i_open <= self.inputs, "i assigns atoms outside I"
        assert not (self.i_true & self.i_open), "i maps an atom to two values"
        assert not (self.j_true & self.j_false), "j maps an atom to two values"
        for rule in self.rules:
            assert rule.is_ground, f"non-ground rule in state: {rule}"


def assume(literal: Literal, state: SystemState) -> SystemState:
    """Pin an assumption: a positive literal joins j's true side and clears
    the atom from the false side; a negative literal symmetrically."""
    a = literal.atom
    if literal.positive:
        return replace(state, j_true=state.j_true | {a}, j_false=state.j_false - {a})
    return replace(state, j_true=state.j_true - {a}, j_false=state.j_false | {a})


def cancel(literal: Literal, state: SystemState) -> SystemState:
    """Drop an assumption; the complementary side is untouched."""
    a = literal.atom
    if literal.positive:
        return replace(state, j_true=state.j_true - {a})
    return replace(state, j_false=state.j_false - {a})


def assert_(atom: Atom, state: SystemState) -> SystemState:
    """Set an input atom's i-value to true. Identity outside I."""
    if atom not in state.inputs:
        return state
    return replace(state, i_true=state.i_true | {atom}, i_open=state.i_open - {atom})


def open_(atom: Atom, state: SystemState) -> SystemState:
    """Set an input atom's i-value to open (unknown). Identity outside I."""
    if atom not in state.inputs:
        return state
    return replace(state, i_true=state.i_true - {atom}, i_open=state.i_open | {atom})


def retract(atom: Atom, state: SystemState) -> SystemState:
    """Reset an input atom's i-value to the false default. Identity outside I."""
    if atom not in state.inputs:
        return state
    return replace(state, i_true=state.i_true - {atom}, i_open=state.i_open - {atom})


def external(atom: Atom, state: SystemState) -> SystemState:
    """Declare an input atom: I grows by the atom unless some rule already
    defines it (released atoms stay defined through their self-supporting
    rule, so they never re-enter I)."""
    if atom in state.inputs or atom in state.head_atoms():
        return state
    return replace(state, inputs=state.inputs | {atom})


def release(atom: Atom, state: SystemState) -> SystemState:
    """Hand an input atom over to the program: add the self-supporting rule
    atom :- atom, remove the atom from I and from i. Identity outside I."""
    if atom not in state.inputs:
        return state
    loop = Rule(head=atom, body=(Literal(atom, positive=True),))
    rules = state.rules if loop in state.rules else state.rules + (loop,)
    return replace(
        state,
        rules=rules,
        inputs=state.inputs - {atom},
        i_true=state.i_true - {atom},
        i_open=state.i_open - {atom},
        released=state.released | {atom},
    )


def _tarjan_sccs(edges: dict[Atom, list[Atom]], nodes: Iterable[Atom]) -> list[set[Atom]]:
    """Iterative Tarjan over the positive dependency graph."""
    index: dict[Atom, int] = {}
    low: dict[Atom, int] = {}
    on_stack: set[Atom] = set()
    stack: list[Atom] = []
    sccs: list[set[Atom]] = []
    counter = 0

    for root in nodes:
        if root in index:
            continue
        work: list[tuple[Atom, int]] = [(root, 0)]
        while work:
            node, edge_pos = work[-1]
            if edge_pos == 0:
                index[node] = low[node] = counter
                counter += 1
                stack.append(node)
                on_stack.add(node)
            advanced = False
            successors = edges.get(node, [])
            while edge_pos < len(successors):
                succ = successors[edge_pos]
                edge_pos += 1
                if succ not in index:
                    work[-1] = (node, edge_pos)
                    work.append((succ, 0))
                    advanced = True
                    break
                if succ in on_stack:
                    low[node] = min(low[node], index[succ])
            if advanced:
                continue
            work.pop()
            if low[node] == index[node]:
                component: set[Atom] = set()
                while True:
                    member = stack.pop()
                    on_stack.discard(member)
                    component.add(member)
                    if member == node:
                        break
                sccs.append(component)
            if work:
                parent, _ = work[-1]
                low[parent] = min(low[parent], low[node])
    return sccs


def compositionality_violation(
    p_rules: Sequence[Rule], q_rules: Sequence[Rule]
) -> Optional[str]:
    """None when P and Q compose; otherwise a message naming the failure:
    overlapping heads, or a positive loop through both head sets."""
    p_heads = head_atoms(p_rules)
    q_heads = head_atoms(q_rules)
    overlap = p_heads & q_heads
    if overlap:
        shown = ", ".join(str(a) for a in sorted(overlap, key=atom_key))
        return f"head atoms defined on both sides: {shown}"
    edges: dict[Atom, list[Atom]] = {}
    nodes: list[Atom] = []
    seen: set[Atom] = set()

    def note(atom: Atom) -> None:
        if atom not in seen:
            seen.add(atom)
            nodes.append(atom)

    for rule in list(p_rules) + list(q_rules):
        if rule.head is None:
            continue
        note(rule.head)
        for dep in rule.pos_atoms():
            note(dep)
            edges.setdefault(rule.head, []).append(dep)
    for scc in _tarjan_sccs(edges, nodes):
        if scc & p_heads and scc & q_heads:
            shown = ", ".join(str(a) for a in sorted(scc, key=atom_key))
            return f"positive dependency cycle crosses both sides: {shown}"
    return None


def compositional(p_rules: Sequence[Rule], q_rules: Sequence[Rule]) -> bool:
    return compositionality_violation(p_rules, q_rules) is None


def _confine(rule: Rule, base: frozenset[Atom]) -> Optional[Rule]:
    """Confinement to an atom base: drop the rule if a positive body atom
    falls outside, delete negative literals on outside atoms."""
    if any(a not in base for a in rule.pos_atoms()):
        return None
    body = tuple(
        e for e in rule.body if e.positive or e.atom in base
    )
    if len(body) == len(rule.body):
        return rule
    return Rule(rule.head, body, rule.choice)


def define(new_rules: Sequence[Rule], state: SystemState) -> SystemState:
    """Add ground rules, confined to the base I ∪ head(R ∪ new). Identity
    when the addition is not compositional with the current rules."""
    for rule in new_rules:
        if not rule.is_ground:
            raise ValueError(f"define requires ground rules, got {rule}")
        if any(True for _ in rule.builtins()):
            raise ValueError(f"define requires builtin-free rules, got {rule}")
    if compositionality_violation(state.rules, new_rules) is not None:
        return state
    merged = list(state.rules)
    present = set(state.rules)
    for rule in new_rules:
        if rule not in present:
            merged.append(rule)
            present.add(rule)
    base = state.inputs | head_atoms(merged)
    confined: list[Rule] = []
    kept: set[Rule] = set()
    for rule in merged:
        shrunk = _confine(rule, base)
        if shrunk is not None and shrunk not in kept:
            confined.append(shrunk)
            kept.add(shrunk)
    rules = tuple(confined)
    inputs = state.inputs - head_atoms(rules)
    # i is a function over I; shrink its domain with I
    return replace(
        state,
        rules=rules,
        inputs=inputs,
        i_true=state.i_true & inputs,
        i_open=state.i_open & inputs,
    )


def induced_program(state: SystemState) -> Program:
    """The program the state stands for: R, facts for i-true inputs, choices
    for open inputs, and constraints enforcing the assumptions."""
    rules = list(state.rules)
    for atom in sorted(state.i_true, key=atom_key):
        rules.append(Rule(head=atom))
    for atom in sorted(state.i_open, key=atom_key):
        rules.append(Rule(head=atom, choice=True))
    for atom in sorted(state.j_true, key=atom_key):
        rules.append(Rule(head=None, body=(Literal(atom, positive=False),)))
    for atom in sorted(state.j_false, key=atom_key):
        rules.append(Rule(head=None, body=(Literal(atom, positive=True),)))
    return Program(tuple(rules))


def fresh_atom(state: SystemState, stem: str = "q") -> tuple[Atom, SystemState]:
    """Next machine-made atom from the reserved namespace, advancing the
    state's counter so names never recur within a session."""
    atom = Atom(f"__{stem}{state.fresh}")
    return atom, replace(state, fresh=state.fresh + 1)
