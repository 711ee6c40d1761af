"""Herbrand instantiation: safety checking, the session universe and atom
table, and substitution-driven grounding with positive-body pruning.

Grounding enumerates substitutions over the universe in lexicographic order
(variables in order of first occurrence, terms by their ground order), so the
emitted instance list is deterministic. Instances are pruned against an
over-approximation of the derivable atoms: the fixpoint of the new rules and
declarations over a base of already-possible atoms, with negation ignored and
choice heads treated as derivable. Pruning only removes rules whose positive
body can never hold, so the stable models are those of full instantiation.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Mapping, Optional, Sequence

from .syntax import (
    Atom,
    BodyElement,
    Comparison,
    Constant,
    ExternalDecl,
    Integer,
    Literal,
    Rule,
    Term,
    Variable,
    atom_key,
    term_key,
)

GroundTerm = Term  # Constant | Integer in practice


class GroundingError(Exception):
    pass


class HerbrandUniverse:
    """Monotonically growing, ordered set of the session's ground terms."""

    def __init__(self) -> None:
        self._terms: set[GroundTerm] = set()
        self._sorted: Optional[list[GroundTerm]] = None

    def add(self, term: GroundTerm) -> None:
        if isinstance(term, Variable):
            return
        if term not in self._terms:
            self._terms.add(term)
            self._sorted = None

    def add_atom(self, atom: Atom) -> None:
        for arg in atom.args:
            self.add(arg)

    def add_rules(self, rules: Iterable[Rule]) -> None:
        for rule in rules:
            for atom in rule.atoms():
                self.add_atom(atom)
            for builtin in rule.builtins():
                self.add(builtin.left)
                self.add(builtin.right)

    def add_decl(self, decl: ExternalDecl) -> None:
        self.add_atom(decl.atom)
        for element in decl.condition:
            if isinstance(element, Literal):
                self.add_atom(element.atom)
            else:
                self.add(element.left)
                self.add(element.right)

    def terms(self) -> list[GroundTerm]:
        if self._sorted is None:
            self._sorted = sorted(self._terms, key=term_key)
        return self._sorted

    def __len__(self) -> int:
        return len(self._terms)


class AtomTable:
    """Session-wide interning of ground atoms to dense integer ids."""

    def __init__(self) -> None:
        self._ids: dict[Atom, int] = {}
        self._atoms: list[Atom] = []

    def intern(self, atom: Atom) -> int:
        ident = self._ids.get(atom)
        if ident is None:
            ident = len(self._atoms)
            self._ids[atom] = ident
            self._atoms.append(atom)
        return ident

    def lookup(self, atom: Atom) -> Optional[int]:
        return self._ids.get(atom)

    def atom(self, ident: int) -> Atom:
        return self._atoms[ident]

    def __len__(self) -> int:
        return len(self._atoms)

    def __contains__(self, atom: Atom) -> bool:
        return atom in self._ids


def _element_variables(elements: Iterable[BodyElement]):
    for element in elements:
        yield from element.variables()


def check_safety(rule: Rule) -> set[str]:
    """Variables violating safety: each variable must occur in a positive
    non-builtin body literal. Empty result means safe."""
    bound = set(_element_variables(
        e for e in rule.body if isinstance(e, Literal) and e.positive
    ))
    return set(rule.variables()) - bound


def check_decl_safety(decl: ExternalDecl) -> set[str]:
    """Safety for #external: the declared atom plays the head role and the
    condition the body role."""
    return check_safety(Rule(head=decl.atom, body=decl.condition))


def _ordered_variables(rule: Rule) -> list[str]:
    seen: list[str] = []
    for name in rule.variables():
        if name not in seen:
            seen.append(name)
    return seen


Substitution = Mapping[str, GroundTerm]


def subst_term(term: Term, theta: Substitution) -> Term:
    if isinstance(term, Variable):
        return theta.get(term.name, term)
    return term


def subst_atom(atom: Atom, theta: Substitution) -> Atom:
    if not atom.args:
        return atom
    return Atom(atom.predicate, tuple(subst_term(t, theta) for t in atom.args))


def subst_element(element: BodyElement, theta: Substitution) -> BodyElement:
    if isinstance(element, Literal):
        return Literal(subst_atom(element.atom, theta), element.positive)
    return Comparison(subst_term(element.left, theta), element.relation,
                      subst_term(element.right, theta))


def subst_rule(rule: Rule, theta: Substitution) -> Rule:
    head = None if rule.head is None else subst_atom(rule.head, theta)
    return Rule(head, tuple(subst_element(e, theta) for e in rule.body), rule.choice)


def _substitutions(variables: Sequence[str], terms: Sequence[GroundTerm]):
    if not variables:
        yield {}
        return
    for combo in itertools.product(terms, repeat=len(variables)):
        yield dict(zip(variables, combo))


def _instance_body_possible(rule: Rule, possible: set[Atom]) -> bool:
    for element in rule.body:
        if isinstance(element, Comparison):
            if not element.holds():
                return False
        elif element.positive and element.atom not in possible:
            return False
    return True


def _strip_builtins(rule: Rule) -> Rule:
    body = tuple(e for e in rule.body if isinstance(e, Literal))
    return Rule(rule.head, body, rule.choice)


def _saturate(
    rules: Sequence[Rule],
    decls: Sequence[ExternalDecl],
    terms: Sequence[GroundTerm],
    base: Iterable[Atom],
) -> tuple[set[Atom], set[Atom]]:
    """Fixpoint of possible atoms: base plus heads of rule instances whose
    positive body is possible, plus instances of declared externals. Returns
    (possible, external instances)."""
    possible = set(base)
    externals: set[Atom] = set()
    rule_vars = [( _ordered_variables(r), r) for r in rules]
    decl_vars = [( _ordered_variables(Rule(d.atom, d.condition)), d) for d in decls]
    changed = True
    while changed:
        changed = False
        for variables, decl in decl_vars:
            probe = Rule(head=decl.atom, body=decl.condition)
            for theta in _substitutions(variables, terms):
                instance = subst_rule(probe, theta)
                if not _instance_body_possible(instance, possible):
                    continue
                if instance.head not in externals:
                    externals.add(instance.head)
                    if instance.head not in possible:
                        possible.add(instance.head)
                        changed = True
        for variables, rule in rule_vars:
            if rule.head is None:
                continue
            for theta in _substitutions(variables, terms):
                instance = subst_rule(rule, theta)
                if not _instance_body_possible(instance, possible):
                    continue
                if instance.head not in possible:
                    possible.add(instance.head)
                    changed = True
    return possible, externals


def ground_unit(
    rules: Sequence[Rule],
    decls: Sequence[ExternalDecl],
    universe: HerbrandUniverse,
    base: Iterable[Atom],
) -> tuple[list[Rule], list[Atom]]:
    """Ground rules and external declarations together against the universe,
    with `base` the atoms already possible in the session (inputs and heads).

    Unsafe rules or declarations raise GroundingError; callers wanting a
    message with the offending variables should pre-check with check_safety.
    """
    for rule in rules:
        unsafe = check_safety(rule)
        if unsafe:
            raise GroundingError(
                f"unsafe rule {rule} (variables: {', '.join(sorted(unsafe))})"
            )
    for decl in decls:
        unsafe = check_decl_safety(decl)
        if unsafe:
            raise GroundingError(
                f"unsafe declaration {decl} (variables: {', '.join(sorted(unsafe))})"
            )
    terms = universe.terms()
    possible, externals = _saturate(rules, decls, terms, base)
    ground: list[Rule] = []
    for rule in rules:
        variables = _ordered_variables(rule)
        for theta in _substitutions(variables, terms):
            instance = subst_rule(rule, theta)
            if _instance_body_possible(instance, possible):
                ground.append(_strip_builtins(instance))
    return ground, sorted(externals, key=atom_key)


def ground_rules(
    rules: Sequence[Rule],
    universe: HerbrandUniverse,
    base: Iterable[Atom],
) -> list[Rule]:
    """Ground instances of `rules`, deterministically ordered: source order,
    then lexicographic substitution order."""
    ground, _ = ground_unit(rules, (), universe, base)
    return ground


def ground_external(
    decl: ExternalDecl,
    universe: HerbrandUniverse,
    base: Iterable[Atom],
) -> list[Atom]:
    """Input-atom instances of one #external declaration, sorted. Negative
    condition literals are ignored (over-approximation); positives must be
    possible in `base`."""
    _, externals = ground_unit((), (decl,), universe, base)
    return externals
