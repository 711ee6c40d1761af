"""Boolean query compilation and the scoped query protocol.

A compound query φ compiles to a small definite-with-negation program whose
rules derive a machine-made target atom exactly when φ holds. The rules are
scoped to one query by a fresh enabler atom appended to every body: declare
the enabler as input, define the annotated rules, assert the enabler, solve
with the target assumed, then release the enabler. Released enablers make the
query rules permanently inert, and the session drops those dead rules to keep
state small; the release-added self-loop stays.

Matching models are consolidated per entailment mode: enumerate keeps the
list, union takes the brave ⋃, intersection the cautious ⋂ with an empty
collection reported unsatisfiable.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence, Union

from .ground import HerbrandUniverse, AtomTable, ground_rules
from .solver import GroundProgram, solve
from .state import (
    SystemState,
    assert_,
    define,
    external,
    fresh_atom,
    induced_program,
    release,
)
from .syntax import (
    Atom,
    Literal,
    QueryAnd,
    QueryExpr,
    QueryLit,
    RESERVED_PREFIX,
    Rule,
    query_is_conjunctive,
    query_is_ground,
    query_literals,
)


class QueryError(Exception):
    pass


@dataclass(frozen=True)
class Enumerate:
    limit: int = 1  # 0 = all models


@dataclass(frozen=True)
class UnionMode:
    pass


@dataclass(frozen=True)
class IntersectionMode:
    pass


Mode = Union[Enumerate, UnionMode, IntersectionMode]

Filter = Callable[[list[frozenset[Atom]]], list[frozenset[Atom]]]


def identity_filter(models: list[frozenset[Atom]]) -> list[frozenset[Atom]]:
    return models


@dataclass
class QueryAnswer:
    verdict: str  # yes | no
    status: str  # SAT | UNSAT
    models: list[frozenset[Atom]]  # matching models, machine atoms stripped
    consolidated: Optional[frozenset[Atom]]  # union/intersection payload


def compile_boolean(
    expr: QueryExpr, state: SystemState
) -> tuple[list[Rule], Atom, SystemState]:
    """Rules deriving a fresh target atom exactly when the ground expression
    holds: leaves test their atom, negated leaves invert the leaf target,
    conjunctions chain, disjunctions branch. Targets are numbered post-order
    from the state's fresh counter."""
    rules: list[Rule] = []
    current = state

    def fresh() -> Atom:
        nonlocal current
        atom, current = fresh_atom(current, "q")
        return atom

    def walk(node: QueryExpr) -> Atom:
        if isinstance(node, QueryLit):
            if node.literal.positive:
                target = fresh()
                rules.append(Rule(target, (node.literal,)))
                return target
            inner = walk(QueryLit(node.literal.complement()))
            target = fresh()
            rules.append(Rule(target, (Literal(inner, positive=False),)))
            return target
        sub_targets = [walk(child) for child in node.children]
        if isinstance(node, QueryAnd):
            target = fresh()
            body = tuple(Literal(t, positive=True) for t in sub_targets)
            rules.append(Rule(target, body))
            return target
        target = fresh()
        for t in sub_targets:
            rules.append(Rule(target, (Literal(t, positive=True),)))
        return target

    target = walk(expr)
    return rules, target, current


def ext_annotate(rules: Sequence[Rule], enabler: Atom) -> list[Rule]:
    """Append the enabler positively to every body, scoping the rules to the
    window where the enabler is asserted."""
    guard = Literal(enabler, positive=True)
    return [Rule(r.head, r.body + (guard,), r.choice) for r in rules]


def consolidate(
    models: list[frozenset[Atom]], mode: Mode, filt: Filter
) -> Union[list[frozenset[Atom]], frozenset[Atom], None]:
    """Fold matching models per mode. None signals the empty intersection
    collection (cautious entailment over nothing: unsatisfiable)."""
    kept = filt(list(models))
    if isinstance(mode, Enumerate):
        return kept[: mode.limit] if mode.limit else kept
    if isinstance(mode, UnionMode):
        merged: frozenset[Atom] = frozenset()
        for model in kept:
            merged |= model
        return merged
    if not kept:
        return None
    intersection = kept[0]
    for model in kept[1:]:
        intersection &= model
    return intersection


def _strip_reserved(model: frozenset[Atom]) -> frozenset[Atom]:
    return frozenset(a for a in model if not a.predicate.startswith(RESERVED_PREFIX))


def _judge(
    gp: GroundProgram,
    target: Atom,
    mode: Mode,
    filt: Filter,
) -> QueryAnswer:
    target_id = gp.table.intern(target)
    limit = mode.limit if isinstance(mode, Enumerate) else 0
    result = solve(gp, {target_id: True}, limit)
    models = [_strip_reserved(gp.decode(m)) for m in result.models]
    consolidated: Optional[frozenset[Atom]] = None
    if isinstance(mode, Enumerate):
        verdict = "yes" if result.status == "SAT" else "no"
    elif isinstance(mode, UnionMode):
        verdict = "yes" if result.status == "SAT" else "no"
        merged = consolidate(models, mode, filt)
        consolidated = merged if result.status == "SAT" else None
    else:
        # cautious: the target must hold in every stable model, and there
        # must be at least one
        if result.status == "SAT":
            refute = solve(gp, {target_id: False}, 1)
            verdict = "yes" if refute.status == "UNSAT" else "no"
            consolidated = consolidate(models, mode, filt)
        else:
            verdict = "no"
    return QueryAnswer(verdict, result.status, models, consolidated)


def _scoped_query(
    qrules: list[Rule],
    target: Atom,
    mode: Mode,
    filt: Filter,
    state: SystemState,
    table: AtomTable,
) -> tuple[QueryAnswer, SystemState]:
    """external(e) -> define(ext(Q, e)) -> assert(e) -> solve -> release(e)."""
    enabler, s0 = fresh_atom(state, "e")
    s1 = external(enabler, s0)
    s2 = define(ext_annotate(qrules, enabler), s1)
    s3 = assert_(enabler, s2)
    gp = GroundProgram.from_rules(induced_program(s3).rules, table)
    answer = _judge(gp, target, mode, filt)
    s4 = release(enabler, s3)
    # the enabler is false forever after release; its query rules are inert
    loop = Rule(enabler, (Literal(enabler, positive=True),))
    rules = tuple(
        r for r in s4.rules if r == loop or enabler not in set(r.pos_atoms())
    )
    return answer, replace(s4, rules=rules)


def run_query(
    expr: QueryExpr,
    mode: Mode,
    filt: Filter,
    state: SystemState,
    table: AtomTable,
) -> tuple[QueryAnswer, SystemState]:
    """Answer a ground query. Atomic positive queries solve directly with the
    atom assumed; compound ones run the scoped protocol."""
    if not query_is_ground(expr):
        raise QueryError("run_query requires a ground expression")
    if isinstance(expr, QueryLit) and expr.literal.positive:
        gp = GroundProgram.from_rules(induced_program(state).rules, table)
        return _judge(gp, expr.literal.atom, mode, filt), state
    qrules, target, s0 = compile_boolean(expr, state)
    return _scoped_query(qrules, target, mode, filt, s0, table)


def run_nonground_query(
    expr: QueryExpr,
    mode: Mode,
    filt: Filter,
    state: SystemState,
    table: AtomTable,
    universe: HerbrandUniverse,
) -> tuple[QueryAnswer, SystemState]:
    """Answer a non-ground conjunctive query: ground the defining rule over
    the session universe, then run the scoped protocol on the instances. A
    model matches when some instance of the conjunction holds in it."""
    if not query_is_conjunctive(expr):
        raise QueryError("non-ground queries must be conjunctions of literals")
    literals = tuple(query_literals(expr))
    bound: set[str] = set()
    for lit in literals:
        if lit.positive:
            bound.update(lit.atom.variables())
    unsafe = {v for lit in literals for v in lit.atom.variables()} - bound
    if unsafe:
        raise QueryError(
            f"unsafe query (variables: {', '.join(sorted(unsafe))})"
        )
    target, s0 = fresh_atom(state, "q")
    defining = Rule(target, literals)
    base = s0.inputs | s0.head_atoms()
    instances = ground_rules([defining], universe, base)
    return _scoped_query(instances, target, mode, filt, s0, table)
