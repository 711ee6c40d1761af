"""Stable-model enumeration for ground normal programs with choices.

The enumerator runs a chronological DFS over atom ids in ascending order,
True branch first, interleaved with unit-style propagation (forced heads,
near-violated constraints, unsupported atoms). Each total assignment is
verified against the reduct before being reported, so soundness rests on
check_stable alone and propagation is free to stay incomplete.

brute_force_models enumerates candidate sets directly and exists to
cross-check the enumerator on small programs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional

from .syntax import Atom, Rule
from .ground import AtomTable

HEAD_ATOM = 0
HEAD_CHOICE = 1
CONSTRAINT = 2


@dataclass(frozen=True)
class GroundRule:
    kind: int
    head: int  # -1 for constraints
    pos: tuple[int, ...]
    neg: tuple[int, ...]


class GroundProgram:
    """Rules over dense atom ids plus occurrence indices."""

    def __init__(self, rules: list[GroundRule], table: AtomTable):
        self.rules = rules
        self.table = table
        atoms: set[int] = set()
        for rule in rules:
            if rule.head >= 0:
                atoms.add(rule.head)
            atoms.update(rule.pos)
            atoms.update(rule.neg)
        self.atoms: tuple[int, ...] = tuple(sorted(atoms))
        self.atom_set: frozenset[int] = frozenset(atoms)
        self.head_rules: dict[int, list[int]] = {}
        for index, rule in enumerate(rules):
            if rule.head >= 0:
                self.head_rules.setdefault(rule.head, []).append(index)

    @classmethod
    def from_rules(cls, rules: Iterable[Rule], table: AtomTable) -> "GroundProgram":
        compiled: list[GroundRule] = []
        for rule in rules:
            if not rule.is_ground:
                raise ValueError(f"non-ground rule reached the solver: {rule}")
            if any(True for _ in rule.builtins()):
                raise ValueError(f"unevaluated builtin reached the solver: {rule}")
            if rule.head is None:
                head = -1
                kind = CONSTRAINT
            else:
                head = table.intern(rule.head)
                kind = HEAD_CHOICE if rule.choice else HEAD_ATOM
            pos = tuple(table.intern(a) for a in rule.pos_atoms())
            neg = tuple(table.intern(a) for a in rule.neg_atoms())
            compiled.append(GroundRule(kind, head, pos, neg))
        return cls(compiled, table)

    def decode(self, model: frozenset[int]) -> frozenset[Atom]:
        return frozenset(self.table.atom(i) for i in model)


@dataclass
class SolveResult:
    models: list[frozenset[int]]
    status: str  # SAT | UNSAT
    exhausted: bool  # False when the model limit cut enumeration short


def _definite_closure(rules: list[tuple[int, tuple[int, ...]]]) -> set[int]:
    """Least model of (head, positive body) pairs by naive iteration."""
    derived: set[int] = set()
    changed = True
    while changed:
        changed = False
        for head, pos in rules:
            if head not in derived and all(p in derived for p in pos):
                derived.add(head)
                changed = True
    return derived


def check_stable(gp: GroundProgram, candidate: frozenset[int]) -> bool:
    """Gelfond-Lifschitz check: candidate equals the least model of its
    reduct and fires no constraint."""
    definite: list[tuple[int, tuple[int, ...]]] = []
    for rule in gp.rules:
        if any(n in candidate for n in rule.neg):
            continue  # negative body falsified; rule drops out of the reduct
        if rule.kind == CONSTRAINT:
            if all(p in candidate for p in rule.pos):
                return False
        elif rule.kind == HEAD_ATOM:
            definite.append((rule.head, rule.pos))
        elif rule.head in candidate:  # choice keeps a rule only for chosen atoms
            definite.append((rule.head, rule.pos))
    return _definite_closure(definite) == candidate


def least_model(gp: GroundProgram) -> frozenset[int]:
    """Least model of a definite program (no negation, choices, constraints)."""
    for rule in gp.rules:
        if rule.kind != HEAD_ATOM or rule.neg:
            raise ValueError("least_model requires a definite program")
    return frozenset(_definite_closure([(r.head, r.pos) for r in gp.rules]))


def _propagate(gp: GroundProgram, assign: dict[int, Optional[bool]]) -> bool:
    """Extend assign by local consequences; False on conflict."""

    def set_value(atom: int, value: bool) -> bool:
        current = assign.get(atom)
        if current is None:
            assign[atom] = value
            return True
        return current == value

    changed = True
    while changed:
        changed = False
        for rule in gp.rules:
            falsified = False
            unassigned: list[tuple[int, bool]] = []  # (atom, value making literal true)
            for p in rule.pos:
                value = assign.get(p)
                if value is False:
                    falsified = True
                    break
                if value is None:
                    unassigned.append((p, True))
            if not falsified:
                for n in rule.neg:
                    value = assign.get(n)
                    if value is True:
                        falsified = True
                        break
                    if value is None:
                        unassigned.append((n, False))
            if falsified:
                continue
            if not unassigned:
                if rule.kind == CONSTRAINT:
                    return False
                if rule.kind == HEAD_ATOM:
                    before = assign.get(rule.head)
                    if not set_value(rule.head, True):
                        return False
                    if before is None:
                        changed = True
            elif rule.kind == CONSTRAINT and len(unassigned) == 1:
                atom, makes_true = unassigned[0]
                if not set_value(atom, not makes_true):
                    return False
                changed = True
        # an atom with no rule whose body can still hold has no support
        for atom in gp.atoms:
            if assign.get(atom) is False:
                continue
            supportable = False
            for index in gp.head_rules.get(atom, ()):
                rule = gp.rules[index]
                if any(assign.get(p) is False for p in rule.pos):
                    continue
                if any(assign.get(n) is True for n in rule.neg):
                    continue
                supportable = True
                break
            if not supportable:
                if assign.get(atom) is True:
                    return False
                assign[atom] = False
                changed = True
    return True


def solve(
    gp: GroundProgram,
    assumptions: Optional[Mapping[int, bool]] = None,
    limit: int = 0,
) -> SolveResult:
    """Enumerate stable models containing every positively assumed atom and
    no negatively assumed one. limit=0 enumerates all; models arrive in DFS
    order (ascending atom ids, True branch first) and are distinct by
    construction."""
    seed: dict[int, Optional[bool]] = {}
    for atom, value in (assumptions or {}).items():
        if atom in gp.atom_set:
            seed[atom] = value
        elif value:
            # a positive assumption on an atom the program never derives
            return SolveResult([], "UNSAT", True)
    models: list[frozenset[int]] = []
    stopped = False

    def search(assign: dict[int, Optional[bool]]) -> None:
        nonlocal stopped
        if not _propagate(gp, assign):
            return
        decision = None
        for atom in gp.atoms:
            if assign.get(atom) is None:
                decision = atom
                break
        if decision is None:
            candidate = frozenset(a for a in gp.atoms if assign.get(a))
            if check_stable(gp, candidate):
                models.append(candidate)
                if limit and len(models) >= limit:
                    stopped = True
            return
        for value in (True, False):
            child = dict(assign)
            child[decision] = value
            search(child)
            if stopped:
                return

    search(seed)
    status = "SAT" if models else "UNSAT"
    return SolveResult(models, status, exhausted=not stopped)


def brute_force_models(gp: GroundProgram) -> list[frozenset[int]]:
    """All stable models by direct candidate enumeration, lexicographically
    ordered by sorted atom-id tuple. Guarded to small programs."""
    if len(gp.atoms) > 20:
        raise ValueError(f"brute force capped at 20 atoms, got {len(gp.atoms)}")
    # candidates beyond head atoms cannot verify: the reduct's least model
    # only ever contains rule heads
    heads = sorted(gp.head_rules)
    found: list[frozenset[int]] = []
    for size in range(len(heads) + 1):
        for subset in itertools.combinations(heads, size):
            candidate = frozenset(subset)
            if check_stable(gp, candidate):
                found.append(candidate)
    return sorted(found, key=lambda m: tuple(sorted(m)))
