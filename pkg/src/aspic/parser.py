"""Tokenizer and parsers for programs, shell commands, and query expressions.

Program format:

    program  := (rule | directive)*
    rule     := head "." | head ":-" body "." | ":-" body "."
    head     := atom | "{" atom "}"
    body     := element ("," element)*
    element  := ["not"] atom | term rel term
    atom     := ident ["(" term ("," term)* ")"]
    term     := ident | integer | variable
    directive := "#external" atom [":" body] "." | "#show" ident "/" integer "."

Query expressions ("&" binds tighter than "|", "[" "]" groups, negation on
atoms only):

    query := conj ("|" conj)*
    conj  := unit ("&" unit)*
    unit  := ["not"] atom | "[" query "]"

Identifiers start lowercase (or underscore), variables uppercase; "%" starts
a comment. The "__" identifier prefix is reserved for machine-made atoms and
rejected everywhere user text is parsed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from .syntax import (
    Atom,
    BodyElement,
    Command,
    Comparison,
    Constant,
    DefineCommand,
    Directive,
    ExternalCommand,
    ExternalDecl,
    AssertCommand,
    AssumeCommand,
    CancelCommand,
    ExitCommand,
    HelpCommand,
    Integer,
    Literal,
    LoadCommand,
    OpenCommand,
    OptionCommand,
    Program,
    QueryAnd,
    QueryCommand,
    QueryExpr,
    QueryLit,
    QueryOr,
    RESERVED_PREFIX,
    RetractCommand,
    Rule,
    ShowSignature,
    StateCommand,
    Term,
    Variable,
    query_is_conjunctive,
    query_is_ground,
)


class ParseError(Exception):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.message = message
        self.line = line
        self.col = col
        where = f"line {line} col {col}: " if line else ""
        super().__init__(f"{where}{message}")


@dataclass(frozen=True)
class Token:
    kind: str  # ident | var | int | punct | dir | eof
    text: str
    line: int
    col: int


_PUNCT2 = (":-", "!=", "<=", ">=")
_PUNCT1 = ".,(){}[]:|&?/=<>"


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "%":
            while i < n and text[i] != "\n":
                i += 1
            continue
        start_line, start_col = line, col
        two = text[i : i + 2]
        if two in _PUNCT2:
            tokens.append(Token("punct", two, start_line, start_col))
            i += 2
            col += 2
            continue
        if ch == "#":
            j = i + 1
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            if word not in ("#external", "#show"):
                raise ParseError(f"unknown directive {word}", start_line, start_col)
            tokens.append(Token("dir", word, start_line, start_col))
            col += j - i
            i = j
            continue
        if ch in _PUNCT1:
            tokens.append(Token("punct", ch, start_line, start_col))
            i += 1
            col += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(Token("int", text[i:j], start_line, start_col))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            kind = "var" if ch.isupper() else "ident"
            tokens.append(Token(kind, word, start_line, start_col))
            col += j - i
            i = j
            continue
        raise ParseError(f"unexpected character {ch!r}", start_line, start_col)
    tokens.append(Token("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def at_punct(self, text: str) -> bool:
        tok = self.peek()
        return tok.kind == "punct" and tok.text == text

    def take_punct(self, text: str) -> bool:
        if self.at_punct(text):
            self.advance()
            return True
        return False

    def expect_punct(self, text: str) -> Token:
        tok = self.peek()
        if tok.kind != "punct" or tok.text != text:
            raise ParseError(f"expected {text!r}, found {self._show(tok)}", tok.line, tok.col)
        return self.advance()

    def at_end(self) -> bool:
        return self.peek().kind == "eof"

    def expect_end(self) -> None:
        tok = self.peek()
        if tok.kind != "eof":
            raise ParseError(f"unexpected trailing {self._show(tok)}", tok.line, tok.col)

    @staticmethod
    def _show(tok: Token) -> str:
        return "end of input" if tok.kind == "eof" else repr(tok.text)

    # --- terms and atoms ---

    def _checked_ident(self, tok: Token) -> str:
        if tok.text.startswith(RESERVED_PREFIX):
            raise ParseError(
                f"identifier {tok.text!r} uses the reserved '__' prefix", tok.line, tok.col
            )
        return tok.text

    def term(self) -> Term:
        tok = self.peek()
        if tok.kind == "int":
            self.advance()
            return Integer(int(tok.text))
        if tok.kind == "var":
            self.advance()
            return Variable(tok.text)
        if tok.kind == "ident":
            self.advance()
            return Constant(self._checked_ident(tok))
        raise ParseError(f"expected a term, found {self._show(tok)}", tok.line, tok.col)

    def atom(self) -> Atom:
        tok = self.peek()
        if tok.kind != "ident":
            raise ParseError(f"expected an atom, found {self._show(tok)}", tok.line, tok.col)
        if tok.text == "not":
            raise ParseError("'not' is a keyword, not a predicate", tok.line, tok.col)
        self.advance()
        name = self._checked_ident(tok)
        args: list[Term] = []
        if self.take_punct("("):
            args.append(self.term())
            while self.take_punct(","):
                args.append(self.term())
            self.expect_punct(")")
        return Atom(name, tuple(args))

    def _at_keyword(self, word: str) -> bool:
        tok = self.peek()
        return tok.kind == "ident" and tok.text == word

    def body_element(self) -> BodyElement:
        tok = self.peek()
        if self._at_keyword("not"):
            self.advance()
            nxt = self.peek()
            if nxt.kind in ("var", "int"):
                raise ParseError("negation applies to atoms only", nxt.line, nxt.col)
            atom = self.atom()
            self._reject_relation_after_atom()
            return Literal(atom, positive=False)
        if tok.kind in ("var", "int"):
            left = self.term()
            return self._comparison(left)
        # ident: an atom, or a constant on the left of a relation
        atom = self.atom()
        rel = self.peek()
        if rel.kind == "punct" and rel.text in ("=", "!=", "<", "<=", ">", ">="):
            if atom.args:
                raise ParseError("comparisons relate terms, not atoms", rel.line, rel.col)
            return self._comparison(Constant(atom.predicate))
        return Literal(atom, positive=True)

    def _reject_relation_after_atom(self) -> None:
        tok = self.peek()
        if tok.kind == "punct" and tok.text in ("=", "!=", "<", "<=", ">", ">="):
            raise ParseError("negation applies to atoms only", tok.line, tok.col)

    def _comparison(self, left: Term) -> Comparison:
        tok = self.peek()
        if not (tok.kind == "punct" and tok.text in ("=", "!=", "<", "<=", ">", ">=")):
            raise ParseError(
                f"expected a comparison operator, found {self._show(tok)}", tok.line, tok.col
            )
        self.advance()
        right = self.term()
        return Comparison(left, tok.text, right)

    def body(self) -> tuple[BodyElement, ...]:
        elements = [self.body_element()]
        while self.take_punct(","):
            elements.append(self.body_element())
        return tuple(elements)

    # --- rules and directives ---

    def rule(self) -> Rule:
        if self.take_punct(":-"):
            body = self.body()
            self.expect_punct(".")
            return Rule(head=None, body=body)
        choice = False
        if self.take_punct("{"):
            choice = True
            head = self.atom()
            tok = self.peek()
            if not self.take_punct("}"):
                raise ParseError(
                    "choice heads hold a single atom", tok.line, tok.col
                )
        else:
            head = self.atom()
        if self.take_punct("."):
            return Rule(head=head, choice=choice)
        self.expect_punct(":-")
        body = self.body()
        self.expect_punct(".")
        return Rule(head=head, body=body, choice=choice)

    def directive(self) -> Directive:
        tok = self.advance()
        if tok.text == "#external":
            atom = self.atom()
            condition: tuple[BodyElement, ...] = ()
            if self.take_punct(":"):
                condition = self.body()
            self.expect_punct(".")
            return ExternalDecl(atom, condition)
        # #show
        name_tok = self.peek()
        atom = self.atom()
        if atom.args:
            raise ParseError("expected predicate/arity", name_tok.line, name_tok.col)
        self.expect_punct("/")
        arity_tok = self.peek()
        if arity_tok.kind != "int":
            raise ParseError(
                f"expected an arity, found {self._show(arity_tok)}", arity_tok.line, arity_tok.col
            )
        self.advance()
        self.expect_punct(".")
        return ShowSignature(atom.predicate, int(arity_tok.text))

    def program(self) -> tuple[Program, list[Directive]]:
        rules: list[Rule] = []
        directives: list[Directive] = []
        while not self.at_end():
            if self.peek().kind == "dir":
                directives.append(self.directive())
            else:
                rules.append(self.rule())
        return Program(tuple(rules)), directives

    # --- query expressions ---

    def query(self) -> QueryExpr:
        expr = self._query_conj()
        while self.take_punct("|"):
            right = self._query_conj()
            expr = QueryOr((expr, right))
        return expr

    def _query_conj(self) -> QueryExpr:
        expr = self._query_unit()
        while self.take_punct("&"):
            right = self._query_unit()
            expr = QueryAnd((expr, right))
        return expr

    def _query_unit(self) -> QueryExpr:
        tok = self.peek()
        if self.take_punct("["):
            expr = self.query()
            self.expect_punct("]")
            return expr
        if self._at_keyword("not"):
            self.advance()
            if self.at_punct("["):
                tok = self.peek()
                raise ParseError("negation applies to atoms only", tok.line, tok.col)
            return QueryLit(Literal(self.atom(), positive=False))
        if tok.kind == "ident":
            return QueryLit(Literal(self.atom(), positive=True))
        raise ParseError(f"expected a query atom, found {self._show(tok)}", tok.line, tok.col)


def parse_program(text: str) -> tuple[Program, list[Directive]]:
    """Parse program text into rules and directives."""
    return _Parser(tokenize(text)).program()


def parse_query(text: str) -> QueryExpr:
    """Parse a query expression; non-ground queries must be conjunctions of
    literals."""
    parser = _Parser(tokenize(text))
    tok = parser.peek()
    if tok.kind == "eof":
        raise ParseError("empty query", tok.line, tok.col)
    expr = parser.query()
    parser.expect_end()
    if not query_is_ground(expr) and not query_is_conjunctive(expr):
        raise ParseError("non-ground queries must be conjunctions of literals")
    return expr


@dataclass(frozen=True)
class NeedMoreInput:
    """A define block is still open; feed the next line back in."""

    buffered: str


_COMMAND_WORDS = (
    "load",
    "define",
    "external",
    "assert",
    "open",
    "retract",
    "assume",
    "cancel",
    "query",
    "option",
    "state",
    "help",
    "exit",
)


def _strip_comment(line: str) -> str:
    # a service request may pack several lines into one command string
    return "\n".join(part.split("%", 1)[0] for part in line.split("\n"))


def _finish_define(text: str) -> Union[DefineCommand, NeedMoreInput]:
    stripped = text.rstrip()
    if not stripped.endswith("?"):
        return NeedMoreInput(text)
    program, directives = parse_program(stripped[:-1])
    return DefineCommand(program.rules, tuple(directives))


def _ground_atom_arg(parser: _Parser, verb: str) -> Atom:
    atom = parser.atom()
    parser.take_punct(".")
    parser.expect_end()
    if not atom.is_ground:
        variables = ", ".join(sorted(set(atom.variables())))
        raise ParseError(f"{verb} takes a ground atom (variables: {variables})")
    return atom


def _ground_literal_arg(parser: _Parser, verb: str) -> Literal:
    positive = True
    if parser._at_keyword("not"):
        parser.advance()
        positive = False
    atom = parser.atom()
    parser.take_punct(".")
    parser.expect_end()
    if not atom.is_ground:
        variables = ", ".join(sorted(set(atom.variables())))
        raise ParseError(f"{verb} takes a ground literal (variables: {variables})")
    return Literal(atom, positive)


def parse_command(
    line: str, continuation: Optional[NeedMoreInput] = None
) -> Union[Command, NeedMoreInput, None]:
    """Parse one shell line.

    Returns None for blank input, a NeedMoreInput carrying the buffered text
    while a define block awaits its "?" terminator, and a Command otherwise.
    """
    if continuation is not None:
        return _finish_define(continuation.buffered + "\n" + _strip_comment(line))

    bare = _strip_comment(line).strip()
    if not bare:
        return None
    word = bare.split(None, 1)[0]
    rest = bare[len(word) :].strip()

    if word not in _COMMAND_WORDS:
        raise ParseError(f"unknown command {word!r} (try 'help')")

    if word == "load":
        if not rest:
            raise ParseError("load needs a file path")
        return LoadCommand(rest)
    if word == "define":
        return _finish_define(rest)
    if word == "option":
        if not rest:
            raise ParseError("option needs arguments, e.g. option -n 0")
        return OptionCommand(tuple(rest.split()))
    if word in ("state", "help", "exit"):
        if rest:
            raise ParseError(f"{word} takes no arguments")
        return {"state": StateCommand, "help": HelpCommand, "exit": ExitCommand}[word]()
    if word == "query":
        if not rest:
            raise ParseError("query needs an expression")
        return QueryCommand(parse_query(rest))

    parser = _Parser(tokenize(rest))
    if word == "external":
        atom = parser.atom()
        condition: tuple[BodyElement, ...] = ()
        if parser.take_punct(":"):
            condition = parser.body()
        parser.take_punct(".")
        parser.expect_end()
        return ExternalCommand(ExternalDecl(atom, condition))
    if word == "assert":
        return AssertCommand(_ground_atom_arg(parser, "assert"))
    if word == "open":
        return OpenCommand(_ground_atom_arg(parser, "open"))
    if word == "retract":
        return RetractCommand(_ground_atom_arg(parser, "retract"))
    if word == "assume":
        return AssumeCommand(_ground_literal_arg(parser, "assume"))
    if word == "cancel":
        return CancelCommand(_ground_literal_arg(parser, "cancel"))
    raise ParseError(f"unknown command {word!r} (try 'help')")
