"""Conversion between PDDL tasks and the tagged single-string model format.

A task renders as one line: a GOAL section, an INIT section, then one
ACTION/PRE/EFFECT triple per schema in domain declaration order.  Atoms are
space-separated terms joined by ", "; negated effects carry a "not " prefix;
schema variables appear under their PDDL names with the "?" stripped.  Object
declarations and typing are dropped, which is why decoding reattaches types
from a registry of known domains.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

from .pddl import (
    ActionSchema,
    Domain,
    Literal,
    PredicateSchema,
    Problem,
    ROOT_TYPE,
    TypedObject,
)
from .grounding import GroundAction, GroundTask
from .domains import default_registry

TAG_NAMES = ("GOAL", "INIT", "ACTION", "PRE", "EFFECT")

# Angle-bracket tags are the default surface form; a square-bracket variant
# is available behind a switch.
TAG_STYLES = {
    "angle": {name: f"<{name}>" for name in TAG_NAMES},
    "square": {name: f"[{name}]" for name in TAG_NAMES},
}


class CodecError(ValueError):
    """Malformed linearized task text."""


@dataclass(frozen=True, slots=True)
class LinearizedTask:
    goal_text: str
    init_text: str
    actions: tuple[tuple[str, str, str], ...]  # (name, pre_text, effect_text)
    rendered: str

    def __str__(self):
        return self.rendered


@dataclass(frozen=True, slots=True)
class PlanText:
    rendered: str

    def __str__(self):
        return self.rendered


def _atom_list(literals) -> str:
    return ", ".join(lit.display() for lit in literals)


def _schema_sections(action: ActionSchema) -> tuple[str, str, str]:
    return (
        action.name,
        _atom_list(action.preconditions),
        _atom_list(action.effects),
    )


def encode_task(domain: Domain, problem: Problem, tag_style: str = "angle") -> LinearizedTask:
    """Linearize a (domain, problem) pair; init/goal atom order is preserved."""
    tags = TAG_STYLES[tag_style]
    goal_text = _atom_list(problem.goal)
    init_text = _atom_list(problem.init)
    actions = tuple(_schema_sections(a) for a in domain.actions)

    parts = [tags["GOAL"]]
    if goal_text:
        parts.append(goal_text)
    parts.append(tags["INIT"])
    if init_text:
        parts.append(init_text)
    for name, pre_text, effect_text in actions:
        parts.extend([tags["ACTION"], name, tags["PRE"]])
        if pre_text:
            parts.append(pre_text)
        parts.append(tags["EFFECT"])
        if effect_text:
            parts.append(effect_text)
    return LinearizedTask(goal_text, init_text, actions, " ".join(parts))


# ---------------------------------------------------------------------------
# Decoding


def _split_sections(text: str) -> list[tuple[str, str]]:
    """Split on tag occurrences; returns (tag name, body) pairs in order."""
    marks = []
    for style in TAG_STYLES.values():
        for name, tag in style.items():
            start = 0
            while True:
                i = text.find(tag, start)
                if i < 0:
                    break
                marks.append((i, len(tag), name))
                start = i + 1
    marks.sort()
    if not marks:
        raise CodecError("no section tags found")
    if text[: marks[0][0]].strip():
        raise CodecError("content before the first tag")
    sections = []
    for j, (i, taglen, name) in enumerate(marks):
        end = marks[j + 1][0] if j + 1 < len(marks) else len(text)
        sections.append((name, text[i + taglen : end].strip()))
    return sections


def _parse_atoms(body: str, allow_negated: bool, where: str) -> list[Literal]:
    literals = []
    for chunk in body.split(","):
        tokens = chunk.split()
        if not tokens:
            continue
        negated = tokens[0] == "not"
        if negated:
            tokens = tokens[1:]
            if not tokens:
                raise CodecError(f"bare 'not' in {where} section")
            if not allow_negated:
                raise CodecError(f"negated atom not allowed in {where} section")
        literals.append(Literal(negated, tokens[0], tuple(tokens[1:])))
    return literals


def _parse_structure(text: str):
    sections = _split_sections(text)
    if [name for name, _ in sections[:2]] != ["GOAL", "INIT"]:
        raise CodecError("task must start with GOAL and INIT sections")
    goal = _parse_atoms(sections[0][1], allow_negated=False, where="GOAL")
    init = _parse_atoms(sections[1][1], allow_negated=False, where="INIT")
    rest = sections[2:]
    if len(rest) % 3 != 0:
        raise CodecError("dangling action section")
    actions = []
    for i in range(0, len(rest), 3):
        names = [rest[i][0], rest[i + 1][0], rest[i + 2][0]]
        if names != ["ACTION", "PRE", "EFFECT"]:
            raise CodecError(f"expected ACTION/PRE/EFFECT triple, got {names}")
        name_tokens = rest[i][1].split()
        if len(name_tokens) != 1:
            raise CodecError(f"action name must be a single token, got '{rest[i][1]}'")
        pre = _parse_atoms(rest[i + 1][1], allow_negated=True, where="PRE")
        effect = _parse_atoms(rest[i + 2][1], allow_negated=True, where="EFFECT")
        actions.append((name_tokens[0], pre, effect))
    return goal, init, actions


def _match_registry(actions, registry):
    decoded = tuple(
        (name, tuple(lit.display() for lit in pre), tuple(lit.display() for lit in eff))
        for name, pre, eff in actions
    )
    for domain, rules in registry:
        bundled = tuple(
            (a.name, tuple(l.display() for l in a.preconditions),
             tuple(l.display() for l in a.effects))
            for a in domain.actions
        )
        if bundled == decoded:
            return domain, rules
    return None, ()


def _infer_typed_objects(domain: Domain, rules, init, goal) -> tuple[TypedObject, ...]:
    """Recover object types by unifying constants against typed predicate slots,
    then refining with the registry's name rules where slots are ambiguous."""
    predicates = domain.predicate_table()
    inferred: dict[str, str] = {}
    order: list[str] = []
    for lit in list(init) + list(goal):
        schema = predicates.get(lit.predicate)
        if schema is None:
            raise CodecError(f"predicate '{lit.predicate}' not declared in matched domain")
        if len(lit.args) != schema.arity:
            raise CodecError(
                f"atom '{lit.display()}' has arity {len(lit.args)}, "
                f"declared {schema.arity}"
            )
        for obj, slot_type in zip(lit.args, schema.param_types):
            if obj not in inferred:
                inferred[obj] = slot_type
                order.append(obj)
            else:
                current = inferred[obj]
                if domain.is_subtype(current, slot_type):
                    pass
                elif domain.is_subtype(slot_type, current):
                    inferred[obj] = slot_type
                else:
                    warnings.warn(
                        f"ambiguous type for object '{obj}' "
                        f"({current} vs {slot_type}); using '{ROOT_TYPE}'"
                    )
                    inferred[obj] = ROOT_TYPE
    for obj in order:
        for pattern, type_name in rules:
            if pattern.match(obj) and domain.is_subtype(type_name, inferred[obj]):
                inferred[obj] = type_name
                break
    return tuple(TypedObject(obj, inferred[obj]) for obj in order)


def _synthesize_domain(goal, init, actions) -> Domain:
    """Build an untyped domain straight from the text when no registry entry
    matches; every predicate slot and parameter gets the root type."""
    arities: dict[str, int] = {}

    def note(lit: Literal, where: str):
        prev = arities.get(lit.predicate)
        if prev is None:
            arities[lit.predicate] = len(lit.args)
        elif prev != len(lit.args):
            raise CodecError(
                f"predicate '{lit.predicate}' used with arity {len(lit.args)} "
                f"in {where} but {prev} elsewhere"
            )

    schemas = []
    for name, pre, eff in actions:
        params: list[str] = []
        for lit in pre + eff:
            note(lit, f"action '{name}'")
            for term in lit.args:
                if term not in params:
                    params.append(term)
        schemas.append(
            ActionSchema(
                name,
                tuple(TypedObject(p, ROOT_TYPE) for p in params),
                tuple(pre),
                tuple(eff),
            )
        )
    for lit in list(init) + list(goal):
        note(lit, "init/goal")
    predicates = tuple(
        PredicateSchema(name, tuple(f"x{i}" for i in range(arity)), (ROOT_TYPE,) * arity)
        for name, arity in arities.items()
    )
    return Domain("reconstructed", (), predicates, tuple(schemas), (":strips",))


def decode_task(text: str, registry=None, use_registry: bool = True) -> tuple[Domain, Problem]:
    """Rebuild a (Domain, Problem) pair from a linearized task string.

    When the action sections match a registry domain, its typing is reused and
    objects are inferred from the init/goal atoms; otherwise an untyped domain
    is synthesized.  encode_task(decode_task(text)) reproduces ``text``."""
    goal, init, actions = _parse_structure(text)
    domain, rules = (None, ())
    if use_registry:
        reg = registry if registry is not None else default_registry()
        domain, rules = _match_registry(actions, reg)
    if domain is not None:
        try:
            objects = _infer_typed_objects(domain, rules, init, goal)
            problem = Problem("task", domain.name, objects, tuple(init), tuple(goal))
            return domain, problem
        except CodecError as exc:
            warnings.warn(f"registry domain rejected ({exc}); synthesizing untyped domain")
    domain = _synthesize_domain(goal, init, actions)
    seen: list[str] = []
    for lit in list(init) + list(goal):
        for term in lit.args:
            if term not in seen:
                seen.append(term)
    objects = tuple(TypedObject(term, ROOT_TYPE) for term in seen)
    problem = Problem("task", domain.name, objects, tuple(init), tuple(goal))
    return domain, problem


# ---------------------------------------------------------------------------
# Plan strings


def encode_plan(plan) -> PlanText:
    """Render a plan (sequence of GroundAction or display strings)."""
    names = [a.name if isinstance(a, GroundAction) else str(a) for a in plan]
    return PlanText(", ".join(names))


@dataclass(frozen=True, slots=True)
class ParsedPlan:
    """Result of parsing arbitrary plan text against a ground task.

    ``entries`` holds one (chunk text, resolved action or None) pair per
    non-empty chunk, in order; unknown chunks keep their position so the
    validator fails on them.  A final chunk that looks like a schema name with
    too few arguments is treated as a truncated generation and dropped."""

    entries: tuple[tuple[str, GroundAction | None], ...]
    truncated: bool
    unknown: tuple[str, ...]

    @property
    def actions(self) -> tuple[GroundAction, ...]:
        return tuple(a for _, a in self.entries if a is not None)


def parse_plan_text(text: str, task: GroundTask) -> ParsedPlan:
    table = task.action_by_key()
    chunks = [c.strip() for c in text.split(",")]
    chunks = [" ".join(c.split()) for c in chunks if c.strip()]
    entries: list[tuple[str, GroundAction | None]] = []
    unknown: list[str] = []
    truncated = False
    for pos, chunk in enumerate(chunks):
        action = table.get(chunk)
        if action is not None:
            entries.append((chunk, action))
            continue
        tokens = chunk.split()
        is_last = pos == len(chunks) - 1
        arity = task.schema_arities.get(tokens[0])
        if is_last and arity is not None and arity > len(tokens) - 1:
            truncated = True
            break
        entries.append((chunk, None))
        unknown.append(chunk)
    return ParsedPlan(tuple(entries), truncated, tuple(unknown))
