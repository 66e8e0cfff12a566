"""STRIPS-with-typing subset of PDDL: data model, parser, and printer.

Supported fragment: ``:strips``, ``:typing``, and negative preconditions.
Everything ADL-flavoured (disjunctions, quantifiers, conditional effects,
equality) is rejected with an explicit error naming the construct.
Identifiers are case-insensitive and normalized to lowercase.
"""

from __future__ import annotations

from dataclasses import dataclass, field


class PddlError(Exception):
    """Base class for all PDDL parsing/validation failures."""


class PddlSyntaxError(PddlError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class UnsupportedConstructError(PddlError):
    def __init__(self, construct: str, line: int = 0, column: int = 0):
        loc = f" (line {line}, column {column})" if line else ""
        super().__init__(f"unsupported PDDL construct: {construct}{loc}")
        self.construct = construct


class PddlValidationError(PddlError):
    """Semantic problems: undeclared names, arity mismatches, bad goals."""


ROOT_TYPE = "object"

ALLOWED_REQUIREMENTS = {":strips", ":typing", ":negative-preconditions"}


@dataclass(frozen=True, slots=True)
class TypedObject:
    name: str
    type_name: str = ROOT_TYPE

    def __str__(self):
        return f"{self.name} - {self.type_name}"


@dataclass(frozen=True, slots=True)
class PredicateSchema:
    name: str
    param_names: tuple[str, ...]
    param_types: tuple[str, ...]

    @property
    def arity(self) -> int:
        return len(self.param_types)


@dataclass(frozen=True, slots=True)
class Literal:
    """A possibly negated atom; args are variables (schemas) or objects (ground)."""

    negated: bool
    predicate: str
    args: tuple[str, ...]

    @property
    def atom(self) -> "Literal":
        return self if not self.negated else Literal(False, self.predicate, self.args)

    def negate(self) -> "Literal":
        return Literal(not self.negated, self.predicate, self.args)

    def display(self) -> str:
        """Space-separated rendering, e.g. ``on b1 b2`` / ``not on b1 b2``."""
        body = " ".join((self.predicate,) + self.args)
        return f"not {body}" if self.negated else body

    def __str__(self):
        return self.display()


def atom(predicate: str, *args: str) -> Literal:
    return Literal(False, predicate, tuple(args))


@dataclass(frozen=True, slots=True)
class ActionSchema:
    name: str
    params: tuple[TypedObject, ...]
    preconditions: tuple[Literal, ...]
    effects: tuple[Literal, ...]

    @property
    def arity(self) -> int:
        return len(self.params)


@dataclass(frozen=True, slots=True)
class Domain:
    name: str
    types: tuple[tuple[str, str], ...]  # (type, parent) pairs, excludes the root
    predicates: tuple[PredicateSchema, ...]
    actions: tuple[ActionSchema, ...]
    requirements: tuple[str, ...] = ()

    def type_parents(self) -> dict[str, str | None]:
        table: dict[str, str | None] = {ROOT_TYPE: None}
        for child, parent in self.types:
            table[child] = parent
        return table

    def is_subtype(self, child: str, ancestor: str) -> bool:
        parents = self.type_parents()
        cur: str | None = child
        while cur is not None:
            if cur == ancestor:
                return True
            cur = parents.get(cur)
        return False

    def predicate_table(self) -> dict[str, PredicateSchema]:
        return {p.name: p for p in self.predicates}

    def action_table(self) -> dict[str, ActionSchema]:
        return {a.name: a for a in self.actions}


@dataclass(frozen=True, slots=True)
class Problem:
    name: str
    domain_name: str
    objects: tuple[TypedObject, ...]
    init: tuple[Literal, ...]  # positive ground atoms in document order, deduplicated
    goal: tuple[Literal, ...]  # positive ground atoms


# ---------------------------------------------------------------------------
# S-expression reading


@dataclass(frozen=True, slots=True)
class _Token:
    text: str
    line: int
    column: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
        elif ch in " \t\r":
            col += 1
            i += 1
        elif ch == ";":  # comment to end of line
            while i < n and text[i] != "\n":
                i += 1
        elif ch in "()":
            tokens.append(_Token(ch, line, col))
            col += 1
            i += 1
        else:
            start = i
            start_col = col
            while i < n and text[i] not in " \t\r\n();":
                i += 1
                col += 1
            tokens.append(_Token(text[start:i].lower(), line, start_col))
    return tokens


def _read_sexp(text: str):
    """Parse a single s-expression document into nested lists of _Token."""
    tokens = _tokenize(text)
    if not tokens:
        raise PddlSyntaxError("empty document", 1, 1)
    pos = 0

    def read():
        nonlocal pos
        tok = tokens[pos]
        if tok.text == ")":
            raise PddlSyntaxError("unexpected ')'", tok.line, tok.column)
        if tok.text == "(":
            pos += 1
            items = []
            while True:
                if pos >= len(tokens):
                    raise PddlSyntaxError("unbalanced '(': missing ')'", tok.line, tok.column)
                if tokens[pos].text == ")":
                    pos += 1
                    return items
                items.append(read())
        pos += 1
        return tok

    sexp = read()
    if pos != len(tokens):
        extra = tokens[pos]
        raise PddlSyntaxError("trailing content after document", extra.line, extra.column)
    return sexp


def _head(sexp) -> str:
    if not isinstance(sexp, list) or not sexp or not isinstance(sexp[0], _Token):
        return ""
    return sexp[0].text


def _loc(sexp) -> tuple[int, int]:
    node = sexp
    while isinstance(node, list) and node:
        node = node[0]
    if isinstance(node, _Token):
        return node.line, node.column
    return 0, 0


def _parse_typed_list(items, what: str) -> list[TypedObject]:
    """Parse ``a b - t c d - u e`` style lists; untyped names get the root type."""
    result: list[TypedObject] = []
    pending: list[_Token] = []
    i = 0
    while i < len(items):
        item = items[i]
        if not isinstance(item, _Token):
            line, col = _loc(item)
            raise PddlSyntaxError(f"expected a name in {what} list", line, col)
        if item.text == "-":
            if not pending:
                raise PddlSyntaxError(f"dangling '-' in {what} list", item.line, item.column)
            if i + 1 >= len(items) or not isinstance(items[i + 1], _Token):
                raise PddlSyntaxError(f"missing type after '-' in {what} list", item.line, item.column)
            type_name = items[i + 1].text
            result.extend(TypedObject(t.text, type_name) for t in pending)
            pending = []
            i += 2
        else:
            pending.append(item)
            i += 1
    result.extend(TypedObject(t.text, ROOT_TYPE) for t in pending)
    return result


_ADL_HEADS = {
    "or": "disjunctive condition (or ...)",
    "exists": "existential quantifier (exists ...)",
    "forall": "universal quantifier (forall ...)",
    "when": "conditional effect (when ...)",
    "imply": "implication (imply ...)",
    "=": "equality condition (= ...)",
    "increase": "numeric effect (increase ...)",
    "decrease": "numeric effect (decrease ...)",
}


def _parse_atom(sexp) -> Literal:
    line, col = _loc(sexp)
    if not isinstance(sexp, list) or not sexp:
        raise PddlSyntaxError("expected an atom", line, col)
    head = _head(sexp)
    if head in _ADL_HEADS:
        raise UnsupportedConstructError(_ADL_HEADS[head], line, col)
    if not head or any(not isinstance(t, _Token) for t in sexp):
        raise PddlSyntaxError("malformed atom", line, col)
    name = sexp[0].text
    args = tuple(t.text.lstrip("?") for t in sexp[1:])
    return Literal(False, name, args)


def _parse_literal(sexp) -> Literal:
    if _head(sexp) == "not":
        line, col = _loc(sexp)
        if len(sexp) != 2:
            raise PddlSyntaxError("(not ...) takes exactly one atom", line, col)
        inner = _parse_atom(sexp[1])
        return inner.negate()
    return _parse_atom(sexp)


def _parse_condition_list(sexp, allow_negated: bool, what: str) -> list[Literal]:
    """Parse an atom, a literal, or an (and ...) of those."""
    if _head(sexp) == "and":
        parts = sexp[1:]
    else:
        parts = [sexp]
    literals = []
    for part in parts:
        head = _head(part)
        if head in _ADL_HEADS:
            line, col = _loc(part)
            raise UnsupportedConstructError(_ADL_HEADS[head], line, col)
        lit = _parse_literal(part)
        if lit.negated and not allow_negated:
            line, col = _loc(part)
            raise PddlValidationError(
                f"negated atom '{lit.atom.display()}' not allowed in {what} "
                f"(line {line}, column {col})"
            )
        literals.append(lit)
    return literals


# ---------------------------------------------------------------------------
# Domain parsing


def parse_domain(text: str) -> Domain:
    """Parse a PDDL domain document into a Domain."""
    sexp = _read_sexp(text)
    if _head(sexp) != "define":
        line, col = _loc(sexp)
        raise PddlSyntaxError("expected (define (domain ...) ...)", line, col)

    name = ""
    types: list[tuple[str, str]] = []
    predicates: list[PredicateSchema] = []
    actions: list[ActionSchema] = []
    requirements: list[str] = []

    for section in sexp[1:]:
        head = _head(section)
        line, col = _loc(section)
        if head == "domain":
            if len(section) != 2 or not isinstance(section[1], _Token):
                raise PddlSyntaxError("malformed (domain ...) declaration", line, col)
            name = section[1].text
        elif head == ":requirements":
            for flag in section[1:]:
                if flag.text not in ALLOWED_REQUIREMENTS:
                    raise UnsupportedConstructError(
                        f"requirement {flag.text}", flag.line, flag.column
                    )
                requirements.append(flag.text)
        elif head == ":types":
            for typed in _parse_typed_list(section[1:], "type"):
                types.append((typed.name, typed.type_name))
        elif head == ":constants":
            raise UnsupportedConstructError("domain constants (:constants)", line, col)
        elif head == ":predicates":
            for decl in section[1:]:
                if not isinstance(decl, list) or not decl:
                    raise PddlSyntaxError("malformed predicate declaration", line, col)
                pname = decl[0].text
                params = _parse_typed_list(decl[1:], "predicate parameter")
                schema = PredicateSchema(
                    pname,
                    tuple(p.name.lstrip("?") for p in params),
                    tuple(p.type_name for p in params),
                )
                if any(p.name == pname and p.arity == schema.arity for p in predicates):
                    raise PddlValidationError(
                        f"duplicate predicate declaration: {pname}/{schema.arity}"
                    )
                predicates.append(schema)
        elif head == ":action":
            actions.append(_parse_action(section))
        elif head in (":functions", ":durative-action", ":derived", ":axiom"):
            raise UnsupportedConstructError(f"section {head}", line, col)
        else:
            raise PddlSyntaxError(f"unknown domain section '{head}'", line, col)

    if not name:
        raise PddlValidationError("domain has no name")
    domain = Domain(name, tuple(types), tuple(predicates), tuple(actions), tuple(requirements))
    _check_domain(domain)
    return domain


def _parse_action(section) -> ActionSchema:
    line, col = _loc(section)
    if len(section) < 2 or not isinstance(section[1], _Token):
        raise PddlSyntaxError("action without a name", line, col)
    name = section[1].text
    params: list[TypedObject] = []
    preconditions: list[Literal] = []
    effects: list[Literal] = []
    i = 2
    while i < len(section):
        key = section[i]
        if not isinstance(key, _Token) or not key.text.startswith(":"):
            raise PddlSyntaxError(f"expected a keyword in action '{name}'", *_loc(key))
        if i + 1 >= len(section):
            raise PddlSyntaxError(f"missing value for {key.text} in action '{name}'",
                                  key.line, key.column)
        value = section[i + 1]
        if key.text == ":parameters":
            raw = _parse_typed_list(value, "parameter")
            params = [TypedObject(p.name.lstrip("?"), p.type_name) for p in raw]
        elif key.text == ":precondition":
            preconditions = _parse_condition_list(value, allow_negated=True, what="precondition")
        elif key.text == ":effect":
            effects = _parse_condition_list(value, allow_negated=True, what="effect")
        else:
            raise UnsupportedConstructError(f"action field {key.text}", key.line, key.column)
        i += 2
    return ActionSchema(name, tuple(params), tuple(preconditions), tuple(effects))


def _check_domain(domain: Domain) -> None:
    parents = domain.type_parents()
    for type_name, parent in domain.types:
        if parent not in parents:
            raise PddlValidationError(f"type '{type_name}' has undeclared parent '{parent}'")
    # cycle check: walking to the root must terminate for every type
    for type_name in parents:
        seen = set()
        cur: str | None = type_name
        while cur is not None:
            if cur in seen:
                raise PddlValidationError(f"type hierarchy contains a cycle through '{cur}'")
            seen.add(cur)
            cur = parents.get(cur)

    preds = domain.predicate_table()
    for schema in domain.predicates:
        for t in schema.param_types:
            if t not in parents:
                raise PddlValidationError(
                    f"predicate '{schema.name}' uses undeclared type '{t}'"
                )

    names = set()
    for action in domain.actions:
        if action.name in names:
            raise PddlValidationError(f"duplicate action name '{action.name}'")
        names.add(action.name)
        param_names = [p.name for p in action.params]
        if len(param_names) != len(set(param_names)):
            raise PddlValidationError(f"action '{action.name}' repeats a parameter name")
        for p in action.params:
            if p.type_name not in parents:
                raise PddlValidationError(
                    f"action '{action.name}' parameter '?{p.name}' has undeclared type "
                    f"'{p.type_name}'"
                )
        bound = set(param_names)
        for lit in action.preconditions + action.effects:
            schema = preds.get(lit.predicate)
            if schema is None:
                raise PddlValidationError(
                    f"action '{action.name}' uses undeclared predicate '{lit.predicate}'"
                )
            if len(lit.args) != schema.arity:
                raise PddlValidationError(
                    f"action '{action.name}': '{lit.predicate}' expects {schema.arity} "
                    f"arguments, got {len(lit.args)}"
                )
            for arg in lit.args:
                if arg not in bound:
                    raise PddlValidationError(
                        f"action '{action.name}' uses unbound variable '?{arg}'"
                    )
        effect_atoms = {(lit.negated, lit.predicate, lit.args) for lit in action.effects}
        for negated, pred, args in effect_atoms:
            if negated and (False, pred, args) in effect_atoms:
                raise PddlValidationError(
                    f"action '{action.name}' both adds and deletes "
                    f"'{Literal(False, pred, args).display()}'"
                )


# ---------------------------------------------------------------------------
# Problem parsing


def parse_problem(text: str, domain: Domain) -> Problem:
    """Parse a PDDL problem document and validate it against ``domain``."""
    sexp = _read_sexp(text)
    if _head(sexp) != "define":
        line, col = _loc(sexp)
        raise PddlSyntaxError("expected (define (problem ...) ...)", line, col)

    name = ""
    domain_name = ""
    objects: list[TypedObject] = []
    init: list[Literal] = []
    goal: list[Literal] = []

    for section in sexp[1:]:
        head = _head(section)
        line, col = _loc(section)
        if head == "problem":
            name = section[1].text
        elif head == ":domain":
            domain_name = section[1].text
        elif head == ":objects":
            objects = _parse_typed_list(section[1:], "object")
        elif head == ":init":
            for entry in section[1:]:
                lit = _parse_literal(entry)
                if lit.negated:
                    raise PddlValidationError(
                        f"negated init atom '{lit.atom.display()}' not supported"
                    )
                init.append(lit)
        elif head == ":goal":
            if len(section) != 2:
                raise PddlSyntaxError("(:goal ...) takes exactly one formula", line, col)
            goal = _parse_condition_list(section[1], allow_negated=False, what="goal")
        elif head in (":metric", ":constraints"):
            raise UnsupportedConstructError(f"section {head}", line, col)
        else:
            raise PddlSyntaxError(f"unknown problem section '{head}'", line, col)

    if domain_name != domain.name:
        raise PddlValidationError(
            f"problem declares domain '{domain_name}' but was parsed against '{domain.name}'"
        )

    # drop duplicate init atoms, keeping first occurrence
    seen = set()
    unique_init = []
    for lit in init:
        key = (lit.predicate, lit.args)
        if key not in seen:
            seen.add(key)
            unique_init.append(lit)

    problem = Problem(name, domain_name, tuple(objects), tuple(unique_init), tuple(goal))
    _check_problem(problem, domain)
    return problem


def _check_problem(problem: Problem, domain: Domain) -> None:
    parents = domain.type_parents()
    names = set()
    for obj in problem.objects:
        if obj.name in names:
            raise PddlValidationError(f"duplicate object '{obj.name}'")
        names.add(obj.name)
        if obj.type_name not in parents:
            raise PddlValidationError(
                f"object '{obj.name}' has undeclared type '{obj.type_name}'"
            )
    preds = domain.predicate_table()
    for where, lits in (("init", problem.init), ("goal", problem.goal)):
        for lit in lits:
            schema = preds.get(lit.predicate)
            if schema is None:
                raise PddlValidationError(f"{where} uses undeclared predicate '{lit.predicate}'")
            if len(lit.args) != schema.arity:
                raise PddlValidationError(
                    f"{where} atom '{lit.display()}': expected {schema.arity} arguments"
                )
            for arg in lit.args:
                if arg not in names:
                    raise PddlValidationError(f"{where} uses undeclared object '{arg}'")


# ---------------------------------------------------------------------------
# Printing


def _format_literal(lit: Literal, variables: bool) -> str:
    mark = "?" if variables else ""
    inner = f"({lit.predicate}" + "".join(f" {mark}{a}" for a in lit.args) + ")"
    return f"(not {inner})" if lit.negated else inner


def emit_domain(domain: Domain) -> str:
    """Render a Domain as canonical PDDL text (lowercase, one fact per line)."""
    lines = [f"(define (domain {domain.name})"]
    if domain.requirements:
        flags = " ".join(dict.fromkeys(domain.requirements))
        lines.append(f"  (:requirements {flags})")
    if domain.types:
        lines.append("  (:types")
        for type_name, parent in domain.types:
            lines.append(f"    {type_name} - {parent}")
        lines.append("  )")
    lines.append("  (:predicates")
    for pred in domain.predicates:
        params = "".join(
            f" ?{n} - {t}" for n, t in zip(pred.param_names, pred.param_types)
        )
        lines.append(f"    ({pred.name}{params})")
    lines.append("  )")
    for action in domain.actions:
        lines.append(f"  (:action {action.name}")
        params = " ".join(f"?{p.name} - {p.type_name}" for p in action.params)
        lines.append(f"    :parameters ({params})")
        pre = " ".join(_format_literal(lit, variables=True) for lit in action.preconditions)
        lines.append(f"    :precondition (and {pre})" if pre else "    :precondition (and)")
        eff = " ".join(_format_literal(lit, variables=True) for lit in action.effects)
        lines.append(f"    :effect (and {eff})" if eff else "    :effect (and)")
        lines.append("  )")
    lines.append(")")
    return "\n".join(lines) + "\n"


def emit_problem(problem: Problem) -> str:
    """Render a Problem as canonical PDDL text; objects and init/goal atoms
    are sorted so emission is deterministic for structurally equal inputs."""
    lines = [
        f"(define (problem {problem.name})",
        f"  (:domain {problem.domain_name})",
        "  (:objects",
    ]
    for obj in sorted(problem.objects, key=lambda o: (o.type_name, o.name)):
        lines.append(f"    {obj.name} - {obj.type_name}")
    lines.append("  )")
    lines.append("  (:init")
    for lit in sorted(problem.init, key=lambda l: (l.predicate, l.args)):
        lines.append(f"    {_format_literal(lit, variables=False)}")
    lines.append("  )")
    lines.append("  (:goal (and")
    for lit in sorted(problem.goal, key=lambda l: (l.predicate, l.args)):
        lines.append(f"    {_format_literal(lit, variables=False)}")
    lines.append("  ))")
    lines.append(")")
    return "\n".join(lines) + "\n"


def domains_equal(a: Domain, b: Domain) -> bool:
    """Structural equality: declaration order matters, requirements order does not."""
    return (
        a.name == b.name
        and a.types == b.types
        and a.predicates == b.predicates
        and a.actions == b.actions
        and set(a.requirements) == set(b.requirements)
    )


def problems_equal(a: Problem, b: Problem) -> bool:
    """Structural equality: objects, init, and goal compare as sets."""
    return (
        a.name == b.name
        and a.domain_name == b.domain_name
        and set(a.objects) == set(b.objects)
        and set(a.init) == set(b.init)
        and set(a.goal) == set(b.goal)
    )
