"""Data model for rules, programs, queries, and shell commands.

Terms are function-free: constant symbols, integers, and variables. Atoms own
an ordering key (integers before constants, both by natural order) that every
printed artifact uses, so rendered output is stable across runs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional, Union

RESERVED_PREFIX = "__"


@dataclass(frozen=True)
class Constant:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Integer:
    value: int

    def __str__(self) -> str:
        return str(self.value)


@dataclass(frozen=True)
class Variable:
    name: str

    def __str__(self) -> str:
        return self.name


Term = Union[Constant, Integer, Variable]


def term_key(term: Term) -> tuple:
    """Total order over ground terms: integers numerically, then constants."""
    if isinstance(term, Integer):
        return (0, term.value, "")
    if isinstance(term, Constant):
        return (1, 0, term.name)
    raise ValueError(f"variable {term} has no ground order")


@dataclass(frozen=True)
class Atom:
    predicate: str
    args: tuple[Term, ...] = ()

    @property
    def arity(self) -> int:
        return len(self.args)

    @property
    def is_ground(self) -> bool:
        return not any(isinstance(a, Variable) for a in self.args)

    def variables(self) -> Iterator[str]:
        for a in self.args:
            if isinstance(a, Variable):
                yield a.name

    def __str__(self) -> str:
        if not self.args:
            return self.predicate
        return f"{self.predicate}({','.join(str(a) for a in self.args)})"


def atom_key(atom: Atom) -> tuple:
    return (atom.predicate, atom.arity, tuple(term_key(a) for a in atom.args))


@dataclass(frozen=True)
class Literal:
    """An atom or its default negation."""

    atom: Atom
    positive: bool = True

    def complement(self) -> "Literal":
        return Literal(self.atom, not self.positive)

    def variables(self) -> Iterator[str]:
        return self.atom.variables()

    def __str__(self) -> str:
        return str(self.atom) if self.positive else f"not {self.atom}"


_REL_NEGATION = {"=": "!=", "!=": "=", "<": ">=", "<=": ">", ">": "<=", ">=": "<"}

RELATIONS = tuple(_REL_NEGATION)


@dataclass(frozen=True)
class Comparison:
    """Built-in relation between two terms, evaluated away at grounding."""

    left: Term
    relation: str
    right: Term

    @property
    def is_ground(self) -> bool:
        return not isinstance(self.left, Variable) and not isinstance(self.right, Variable)

    def variables(self) -> Iterator[str]:
        for t in (self.left, self.right):
            if isinstance(t, Variable):
                yield t.name

    def holds(self) -> bool:
        lk, rk = term_key(self.left), term_key(self.right)
        if self.relation == "=":
            return lk == rk
        if self.relation == "!=":
            return lk != rk
        if self.relation == "<":
            return lk < rk
        if self.relation == "<=":
            return lk <= rk
        if self.relation == ">":
            return lk > rk
        if self.relation == ">=":
            return lk >= rk
        raise ValueError(f"unknown relation {self.relation}")

    def __str__(self) -> str:
        return f"{self.left}{self.relation}{self.right}"


BodyElement = Union[Literal, Comparison]


@dataclass(frozen=True)
class Rule:
    """head :- body. A None head is the falsity constraint; choice wraps
    the head in braces."""

    head: Optional[Atom]
    body: tuple[BodyElement, ...] = ()
    choice: bool = False

    def __post_init__(self) -> None:
        if self.choice and self.head is None:
            raise ValueError("choice rule requires a head atom")

    @property
    def is_fact(self) -> bool:
        return self.head is not None and not self.body

    @property
    def is_constraint(self) -> bool:
        return self.head is None

    def pos_atoms(self) -> Iterator[Atom]:
        for e in self.body:
            if isinstance(e, Literal) and e.positive:
                yield e.atom

    def neg_atoms(self) -> Iterator[Atom]:
        for e in self.body:
            if isinstance(e, Literal) and not e.positive:
                yield e.atom

    def builtins(self) -> Iterator[Comparison]:
        for e in self.body:
            if isinstance(e, Comparison):
                yield e

    def atoms(self) -> Iterator[Atom]:
        if self.head is not None:
            yield self.head
        for e in self.body:
            if isinstance(e, Literal):
                yield e.atom

    def variables(self) -> Iterator[str]:
        if self.head is not None:
            yield from self.head.variables()
        for e in self.body:
            yield from e.variables()

    @property
    def is_ground(self) -> bool:
        return not any(True for _ in self.variables())

    def __str__(self) -> str:
        if self.choice:
            head = "{" + str(self.head) + "}"
        else:
            head = "" if self.head is None else str(self.head)
        if not self.body:
            return f"{head}."
        body = ", ".join(str(e) for e in self.body)
        prefix = f"{head} " if head else ""
        return f"{prefix}:- {body}."


def head_atoms(rules) -> frozenset[Atom]:
    """All atoms occurring in rule heads, choice or not."""
    return frozenset(r.head for r in rules if r.head is not None)


@dataclass(frozen=True)
class Program:
    rules: tuple[Rule, ...] = ()

    def __len__(self) -> int:
        return len(self.rules)

    def __iter__(self) -> Iterator[Rule]:
        return iter(self.rules)

    def head_atoms(self) -> frozenset[Atom]:
        return head_atoms(self.rules)

    def atoms(self) -> Iterator[Atom]:
        for r in self.rules:
            yield from r.atoms()

    def __str__(self) -> str:
        return "\n".join(str(r) for r in self.rules)


@dataclass(frozen=True)
class ExternalDecl:
    """#external atom : condition."""

    atom: Atom
    condition: tuple[BodyElement, ...] = ()

    def __str__(self) -> str:
        if not self.condition:
            return f"#external {self.atom}."
        cond = ", ".join(str(e) for e in self.condition)
        return f"#external {self.atom} : {cond}."


@dataclass(frozen=True)
class ShowSignature:
    """#show predicate/arity."""

    predicate: str
    arity: int

    def __str__(self) -> str:
        return f"#show {self.predicate}/{self.arity}."


Directive = Union[ExternalDecl, ShowSignature]


# --- query expressions -------------------------------------------------
#
# Negation normal form by construction: negation lives only on leaves.
# The parser emits binary and/or nodes (left-associative).

@dataclass(frozen=True)
class QueryLit:
    literal: Literal

    def __str__(self) -> str:
        return str(self.literal)


@dataclass(frozen=True)
class QueryAnd:
    children: tuple["QueryExpr", ...]

    def __str__(self) -> str:
        return " & ".join(_query_child_str(c) for c in self.children)


@dataclass(frozen=True)
class QueryOr:
    children: tuple["QueryExpr", ...]

    def __str__(self) -> str:
        return " | ".join(_query_child_str(c) for c in self.children)


QueryExpr = Union[QueryLit, QueryAnd, QueryOr]


def _query_child_str(child: QueryExpr) -> str:
    if isinstance(child, (QueryAnd, QueryOr)):
        return f"[{child}]"
    return str(child)


def query_literals(expr: QueryExpr) -> Iterator[Literal]:
    if isinstance(expr, QueryLit):
        yield expr.literal
    else:
        for c in expr.children:
            yield from query_literals(c)


def query_atoms(expr: QueryExpr) -> Iterator[Atom]:
    for lit in query_literals(expr):
        yield lit.atom


def query_variables(expr: QueryExpr) -> Iterator[str]:
    for atom in query_atoms(expr):
        yield from atom.variables()


def query_is_ground(expr: QueryExpr) -> bool:
    return not any(True for _ in query_variables(expr))


def query_is_conjunctive(expr: QueryExpr) -> bool:
    """True for a single literal or a flat/nested conjunction of literals."""
    if isinstance(expr, QueryLit):
        return True
    if isinstance(expr, QueryAnd):
        return all(query_is_conjunctive(c) for c in expr.children)
    return False


# --- shell commands ----------------------------------------------------

@dataclass(frozen=True)
class LoadCommand:
    path: str


@dataclass(frozen=True)
class DefineCommand:
    rules: tuple[Rule, ...]
    directives: tuple[Directive, ...] = ()


@dataclass(frozen=True)
class ExternalCommand:
    decl: ExternalDecl


@dataclass(frozen=True)
class AssertCommand:
    atom: Atom


@dataclass(frozen=True)
class OpenCommand:
    atom: Atom


@dataclass(frozen=True)
class RetractCommand:
    atom: Atom


@dataclass(frozen=True)
class AssumeCommand:
    literal: Literal


@dataclass(frozen=True)
class CancelCommand:
    literal: Literal


@dataclass(frozen=True)
class QueryCommand:
    expr: QueryExpr


@dataclass(frozen=True)
class OptionCommand:
    args: tuple[str, ...]


@dataclass(frozen=True)
class StateCommand:
    pass


@dataclass(frozen=True)
class HelpCommand:
    pass


@dataclass(frozen=True)
class ExitCommand:
    pass


Command = Union[
    LoadCommand,
    DefineCommand,
    ExternalCommand,
    AssertCommand,
    OpenCommand,
    RetractCommand,
    AssumeCommand,
    CancelCommand,
    QueryCommand,
    OptionCommand,
    StateCommand,
    HelpCommand,
    ExitCommand,
]
