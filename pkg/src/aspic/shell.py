"""Interactive shell: one Session object carries the full engine, and the
REPL is a thin loop of parse, execute, render.

Command results are structured so the JSON service and the text renderer
draw from the same data; whatever the shell prints for a command is exactly
what the service serializes.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence, TextIO

from . import query as query_mod
from . import state as state_mod
from .ground import (
    AtomTable,
    GroundingError,
    HerbrandUniverse,
    check_decl_safety,
    check_safety,
    ground_external,
    ground_unit,
)
from .parser import NeedMoreInput, ParseError, parse_command, parse_program
from .query import (
    Enumerate,
    IntersectionMode,
    QueryError,
    UnionMode,
    identity_filter,
)
from .state import SystemState, compositionality_violation
from .syntax import (
    AssertCommand,
    AssumeCommand,
    Atom,
    CancelCommand,
    Command,
    DefineCommand,
    ExitCommand,
    ExternalCommand,
    ExternalDecl,
    HelpCommand,
    LoadCommand,
    OpenCommand,
    OptionCommand,
    QueryCommand,
    RetractCommand,
    Rule,
    ShowSignature,
    StateCommand,
    atom_key,
    query_is_ground,
)

PROMPT = "?- "

HELP_TEXT = """\
commands:
  load PATH                 read a program file: rules, #external, #show
  define RULES ?            add rules; the block ends with a lone ?
  external ATOM [: COND]    declare input atoms
  assert ATOM               set an input atom to true
  open ATOM                 let an input atom vary
  retract ATOM              reset an input atom to false
  assume [not] ATOM         pin an atom's truth value in every answer
  cancel [not] ATOM         drop an assumption
  query EXPR                ask about answer sets (& | not, [ ] to group)
  option -n N | -e MODE     N answers per query (0 = all); brave, cautious,
                            or auto entailment
  state                     print the session state
  help                      this text
  exit                      leave the shell"""


@dataclass
class SessionOptions:
    limit: int = 1
    entail: str = "enumerate"  # enumerate | brave | cautious


@dataclass
class CommandResult:
    ok: bool = True
    error: Optional[str] = None
    warnings: list[str] = field(default_factory=list)
    message: Optional[str] = None
    verdict: Optional[str] = None
    sat: Optional[str] = None
    models: Optional[list[list[str]]] = None
    consolidated: Optional[list[str]] = None
    pending: bool = False
    exit: bool = False


def _error(message: str) -> CommandResult:
    return CommandResult(ok=False, error=message)


class Session:
    """All session state: the quadruple, the universe, the atom table, and
    the shell options."""

    def __init__(self) -> None:
        self.state = SystemState()
        self.universe = HerbrandUniverse()
        self.table = AtomTable()
        self.options = SessionOptions()
        self._pending: Optional[NeedMoreInput] = None

    @property
    def pending(self) -> bool:
        return self._pending is not None

    def execute_line(self, line: str) -> CommandResult:
        try:
            parsed = parse_command(line, self._pending)
        except ParseError as exc:
            self._pending = None
            return _error(str(exc))
        if parsed is None:
            return CommandResult()
        if isinstance(parsed, NeedMoreInput):
            self._pending = parsed
            return CommandResult(pending=True)
        self._pending = None
        return self.execute(parsed)

    def execute(self, command: Command) -> CommandResult:
        if isinstance(command, LoadCommand):
            return self._do_load(command.path)
        if isinstance(command, DefineCommand):
            return self._do_define(command.rules, command.directives)
        if isinstance(command, ExternalCommand):
            return self._do_external(command.decl)
        if isinstance(command, AssertCommand):
            return self._do_set(command.atom, state_mod.assert_)
        if isinstance(command, OpenCommand):
            return self._do_set(command.atom, state_mod.open_)
        if isinstance(command, RetractCommand):
            return self._do_set(command.atom, state_mod.retract)
        if isinstance(command, AssumeCommand):
            self.table.intern(command.literal.atom)
            self.state = state_mod.assume(command.literal, self.state)
            return CommandResult()
        if isinstance(command, CancelCommand):
            self.table.intern(command.literal.atom)
            self.state = state_mod.cancel(command.literal, self.state)
            return CommandResult()
        if isinstance(command, QueryCommand):
            return self._do_query(command)
        if isinstance(command, OptionCommand):
            return self._do_option(command.args)
        if isinstance(command, StateCommand):
            return CommandResult(message=self.dump_state())
        if isinstance(command, HelpCommand):
            return CommandResult(message=HELP_TEXT)
        if isinstance(command, ExitCommand):
            return CommandResult(exit=True)
        return _error(f"unhandled command {command!r}")

    # --- command bodies ---

    def _do_load(self, path: str) -> CommandResult:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            return _error(f"cannot read {path}: {exc.strerror or exc}")
        try:
            program, directives = parse_program(text)
        except ParseError as exc:
            return _error(f"{path}: {exc}")
        externals = [d for d in directives if isinstance(d, ExternalDecl)]
        shows = [d for d in directives if isinstance(d, ShowSignature)]
        return self._install(program.rules, externals, shows, f"loaded {path}")

    def _do_define(
        self, rules: tuple[Rule, ...], directives: tuple
    ) -> CommandResult:
        externals = [d for d in directives if isinstance(d, ExternalDecl)]
        shows = [d for d in directives if isinstance(d, ShowSignature)]
        return self._install(rules, externals, shows, "defined")

    def _install(
        self,
        rules: Sequence[Rule],
        externals: Sequence[ExternalDecl],
        shows: Sequence[ShowSignature],
        prefix: str,
    ) -> CommandResult:
        for rule in rules:
            unsafe = check_safety(rule)
            if unsafe:
                names = ", ".join(sorted(unsafe))
                return _error(f"unsafe rule {rule} (variables: {names})")
        for decl in externals:
            unsafe = check_decl_safety(decl)
            if unsafe:
                names = ", ".join(sorted(unsafe))
                return _error(f"unsafe declaration {decl} (variables: {names})")
        self.universe.add_rules(rules)
        for decl in externals:
            self.universe.add_decl(decl)
        base = self.state.inputs | self.state.head_atoms()
        try:
            ground, ext_atoms = ground_unit(rules, externals, self.universe, base)
        except GroundingError as exc:
            return _error(str(exc))
        violation = compositionality_violation(self.state.rules, ground)
        if violation is not None:
            return CommandResult(
                warnings=[f"define is vacuous: {violation}"],
            )
        warnings: list[str] = []
        new_state = self.state
        added_inputs = 0
        for atom in ext_atoms:
            if atom in new_state.released:
                warnings.append(f"{atom} was released and stays defined")
                continue
            grown = state_mod.external(atom, new_state)
            if grown is not new_state:
                added_inputs += 1
            new_state = grown
        rules_before = len(new_state.rules)
        new_state = state_mod.define(ground, new_state)
        rules_added = len(new_state.rules) - rules_before
        if shows:
            new_state = replace(
                new_state,
                shows=new_state.shows | {(s.predicate, s.arity) for s in shows},
            )
        self.state = new_state
        parts = [f"{rules_added} rules"]
        if ext_atoms:
            parts.append(f"{added_inputs} external atoms")
        if shows:
            parts.append(f"{len(shows)} show directives")
        return CommandResult(message=f"{prefix}: {', '.join(parts)}", warnings=warnings)

    def _do_external(self, decl: ExternalDecl) -> CommandResult:
        unsafe = check_decl_safety(decl)
        if unsafe:
            names = ", ".join(sorted(unsafe))
            return _error(f"unsafe declaration {decl} (variables: {names})")
        self.universe.add_decl(decl)
        base = self.state.inputs | self.state.head_atoms()
        atoms = ground_external(decl, self.universe, base)
        warnings: list[str] = []
        new_state = self.state
        added = 0
        for atom in atoms:
            if atom in new_state.released:
                warnings.append(f"{atom} was released and stays defined")
                continue
            grown = state_mod.external(atom, new_state)
            if grown is not new_state:
                added += 1
            new_state = grown
        self.state = new_state
        return CommandResult(
            message=f"declared {added} external atoms", warnings=warnings
        )

    def _do_set(self, atom: Atom, op) -> CommandResult:
        if atom not in self.state.inputs:
            return CommandResult(
                warnings=[f"{atom} is not an input atom"],
            )
        if op is state_mod.assert_:
            self.universe.add_atom(atom)
        self.state = op(atom, self.state)
        return CommandResult()

    def _do_query(self, command: QueryCommand) -> CommandResult:
        mode: query_mod.Mode
        if self.options.entail == "brave":
            mode = UnionMode()
        elif self.options.entail == "cautious":
            mode = IntersectionMode()
        else:
            mode = Enumerate(self.options.limit)
        try:
            if query_is_ground(command.expr):
                answer, new_state = query_mod.run_query(
                    command.expr, mode, identity_filter, self.state, self.table
                )
            else:
                answer, new_state = query_mod.run_nonground_query(
                    command.expr,
                    mode,
                    identity_filter,
                    self.state,
                    self.table,
                    self.universe,
                )
        except QueryError as exc:
            return _error(str(exc))
        self.state = new_state
        result = CommandResult(verdict=answer.verdict, sat=answer.status)
        if isinstance(mode, Enumerate):
            result.models = [self._project(m) for m in answer.models]
        elif answer.consolidated is not None:
            result.consolidated = self._project(answer.consolidated)
        return result

    def _do_option(self, args: tuple[str, ...]) -> CommandResult:
        limit = self.options.limit
        entail = self.options.entail
        i = 0
        while i < len(args):
            flag = args[i]
            if flag == "-n":
                if i + 1 >= len(args):
                    return _error("option -n needs a count")
                try:
                    value = int(args[i + 1])
                except ValueError:
                    return _error(f"option -n needs an integer, got {args[i + 1]!r}")
                if value < 0:
                    return _error("option -n needs a count >= 0")
                limit = value
                i += 2
            elif flag == "-e":
                if i + 1 >= len(args):
                    return _error("option -e needs a mode")
                choice = args[i + 1]
                if choice not in ("brave", "cautious", "auto"):
                    return _error(f"option -e takes brave, cautious, or auto, got {choice!r}")
                entail = "enumerate" if choice == "auto" else choice
                i += 2
            else:
                return _error(f"unsupported option {flag!r}")
        self.options.limit = limit
        self.options.entail = entail
        return CommandResult()

    # --- projection and state dump ---

    def _project(self, model: frozenset[Atom]) -> list[str]:
        shows = self.state.shows
        if shows:
            kept = [a for a in model if (a.predicate, a.arity) in shows]
        else:
            kept = list(model)
        return [str(a) for a in sorted(kept, key=atom_key)]

    def digest(self) -> dict[str, int]:
        s = self.state
        return {
            "rules": len(s.rules),
            "inputs": len(s.inputs),
            "i_true": len(s.i_true),
            "i_open": len(s.i_open),
            "j_true": len(s.j_true),
            "j_false": len(s.j_false),
        }

    def dump_state(self) -> str:
        s = self.state
        lines = [f"% rules ({len(s.rules)})"]
        lines.extend(str(r) for r in s.rules)
        lines.append(f"% inputs ({len(s.inputs)})")
        for atom in sorted(s.inputs, key=atom_key):
            lines.append(f"{atom} = {s.i_value(atom)}")
        assumed = sorted(s.j_true | s.j_false, key=atom_key)
        lines.append(f"% assumptions ({len(assumed)})")
        for atom in assumed:
            lines.append(f"{atom} = {s.j_value(atom)}")
        lines.append(f"% show ({len(s.shows)})")
        for predicate, arity in sorted(s.shows):
            lines.append(f"#show {predicate}/{arity}.")
        lines.append(f"% released ({len(s.released)})")
        lines.extend(str(a) for a in sorted(s.released, key=atom_key))
        return "\n".join(lines)


def render_models(models: list[list[str]]) -> list[str]:
    """Answer blocks in clingo style: a counter line, then the atoms."""
    lines: list[str] = []
    for index, model in enumerate(models, start=1):
        lines.append(f"Answer: {index}")
        lines.append(" ".join(model))
    return lines


def render_result(result: CommandResult) -> str:
    lines = [f"warning: {w}" for w in result.warnings]
    if result.error:
        lines.append(f"error: {result.error}")
    if result.message:
        lines.append(result.message)
    if result.models is not None:
        lines.extend(render_models(result.models))
    if result.consolidated is not None:
        lines.append(" ".join(result.consolidated))
    if result.sat:
        lines.append(result.sat)
    return "\n".join(lines)


def repl_step(line: str, session: Session) -> str:
    """One REPL iteration: parse, execute, render. Empty string means the
    command produced no output (or a define block is still open)."""
    return render_result(session.execute_line(line))


def run_repl(
    paths: Sequence[str],
    stdin: TextIO = sys.stdin,
    stdout: TextIO = sys.stdout,
) -> int:
    session = Session()
    for path in paths:
        result = session.execute_line(f"load {path}")
        rendered = render_result(result)
        if rendered:
            stdout.write(rendered + "\n")
    interactive = hasattr(stdin, "isatty") and stdin.isatty()
    while True:
        if interactive and not session.pending:
            stdout.write(PROMPT)
            stdout.flush()
        line = stdin.readline()
        if not line:
            break
        result = session.execute_line(line)
        rendered = render_result(result)
        if rendered:
            stdout.write(rendered + "\n")
            stdout.flush()
        if result.exit:
            break
    return 0
