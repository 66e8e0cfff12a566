"""Grounding of typed STRIPS tasks into propositional form.

The grounder enumerates typed instantiations of every action schema, compiles
static predicates (those never touched by an effect) out of the search state,
prunes atoms and actions that are unreachable under delete relaxation, and
produces a fixed, lexicographically ordered fluent atom table.  States are
immutable bitmasks over that table.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from .pddl import Domain, Literal, PddlValidationError, Problem


@dataclass(frozen=True, slots=True)
class State:
    """Set of true fluent atoms, closed-world, as a bitmask over the atom table."""

    mask: int

    def __contains__(self, index: int) -> bool:
        return bool((self.mask >> index) & 1)

    def indices(self) -> tuple[int, ...]:
        out = []
        mask = self.mask
        i = 0
        while mask:
            if mask & 1:
                out.append(i)
            mask >>= 1
            i += 1
        return tuple(out)


@dataclass(frozen=True, slots=True)
class GroundAction:
    """Unit-cost ground action; index sets refer to the owning task's atom table."""

    name: str  # display form, e.g. "unstack b4 b2"
    pre_pos: frozenset[int]
    pre_neg: frozenset[int]
    add: frozenset[int]
    delete: frozenset[int]
    pre_mask: int = field(repr=False)
    preneg_mask: int = field(repr=False)
    add_mask: int = field(repr=False)
    del_mask: int = field(repr=False)
    cost: int = 1


@dataclass(frozen=True, slots=True)
class GroundTask:
    """Grounded task: atom table, actions, initial state, and goal indices."""

    domain_name: str
    problem_name: str
    atoms: tuple[str, ...]
    actions: tuple[GroundAction, ...]
    init: State
    goal: frozenset[int]
    goal_mask: int
    statics: frozenset[str]  # statically true atoms, display form
    schema_arities: dict[str, int]
    unsolvable: bool = False

    def atom_index(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.atoms)}

    def action_by_key(self) -> dict[str, GroundAction]:
        return {a.name: a for a in self.actions}

    def state_atoms(self, state: State) -> tuple[str, ...]:
        return tuple(self.atoms[i] for i in state.indices())


class GroundingError(PddlValidationError):
    """Type mismatch or inconsistency discovered while instantiating schemas."""


def _objects_by_type(domain: Domain, problem: Problem) -> dict[str, list[str]]:
    parents = domain.type_parents()
    table: dict[str, list[str]] = {t: [] for t in parents}
    for obj in problem.objects:
        if obj.type_name not in parents:
            raise GroundingError(f"object '{obj.name}' has undeclared type '{obj.type_name}'")
        cur: str | None = obj.type_name
        while cur is not None:
            table[cur].append(obj.name)
            cur = parents.get(cur)
    return table


def _display(predicate: str, args: tuple[str, ...]) -> str:
    return " ".join((predicate,) + args)


def ground_task(domain: Domain, problem: Problem) -> GroundTask:
    """Ground ``problem`` over ``domain``; marks the task unsolvable when a
    goal atom is not delete-relaxation reachable from the initial state."""
    static_predicates = {p.name for p in domain.predicates}
    for action in domain.actions:
        for lit in action.effects:
            static_predicates.discard(lit.predicate)

    static_true: set[tuple[str, tuple[str, ...]]] = set()
    init_fluents: list[tuple[str, tuple[str, ...]]] = []
    for lit in problem.init:
        key = (lit.predicate, lit.args)
        if lit.predicate in static_predicates:
            static_true.add(key)
        else:
            init_fluents.append(key)

    candidates = _instantiate_schemas(domain, problem, static_predicates, static_true)

    # Delete-relaxation reachability from the initial state: an action fires
    # once all its positive fluent preconditions are reached; negative
    # preconditions and deletes are ignored.
    reached: set[tuple[str, tuple[str, ...]]] = set(init_fluents)
    waiting = list(candidates)
    applicable = []
    changed = True
    while changed:
        changed = False
        still_waiting = []
        for cand in waiting:
            if all(p in reached for p in cand.pre_pos):
                applicable.append(cand)
                for a in cand.add:
                    if a not in reached:
                        reached.add(a)
                        changed = True
            else:
                still_waiting.append(cand)
        waiting = still_waiting

    atom_keys = sorted(reached)
    atoms = tuple(_display(p, args) for p, args in atom_keys)
    index = {key: i for i, key in enumerate(atom_keys)}

    actions = []
    for cand in applicable:
        pre_pos = frozenset(index[p] for p in cand.pre_pos)
        pre_neg = frozenset(index[p] for p in cand.pre_neg if p in index)
        add = frozenset(index[p] for p in cand.add)
        delete = frozenset(index[p] for p in cand.delete if p in index)
        delete = delete - add  # delete-before-add: net effect keeps re-added atoms
        actions.append(
            GroundAction(
                name=cand.name,
                pre_pos=pre_pos,
                pre_neg=pre_neg,
                add=add,
                delete=delete,
                pre_mask=_mask(pre_pos),
                preneg_mask=_mask(pre_neg),
                add_mask=_mask(add),
                del_mask=_mask(delete),
            )
        )

    init_mask = _mask(index[key] for key in init_fluents)

    unsolvable = False
    goal_indices = set()
    for lit in problem.goal:
        key = (lit.predicate, lit.args)
        if lit.predicate in static_predicates:
            if key not in static_true:
                unsolvable = True
        elif key in index:
            goal_indices.add(index[key])
        else:
            unsolvable = True

    return GroundTask(
        domain_name=domain.name,
        problem_name=problem.name,
        atoms=atoms,
        actions=tuple(actions),
        init=State(init_mask),
        goal=frozenset(goal_indices),
        goal_mask=_mask(goal_indices),
        statics=frozenset(_display(p, args) for p, args in static_true),
        schema_arities={a.name: a.arity for a in domain.actions},
        unsolvable=unsolvable,
    )


@dataclass(slots=True)
class _Candidate:
    name: str
    pre_pos: list[tuple[str, tuple[str, ...]]]
    pre_neg: list[tuple[str, tuple[str, ...]]]
    add: list[tuple[str, tuple[str, ...]]]
    delete: list[tuple[str, tuple[str, ...]]]


def _instantiate_schemas(domain, problem, static_predicates, static_true):
    """Enumerate typed ground instances, filtering on static preconditions and
    dropping instances that can never change a state they apply in."""
    objects = _objects_by_type(domain, problem)
    predicates = domain.predicate_table()
    candidates = []
    for schema in domain.actions:
        pools = []
        for param in schema.params:
            if param.type_name not in objects:
                raise GroundingError(
                    f"action '{schema.name}' parameter '?{param.name}' has "
                    f"undeclared type '{param.type_name}'"
                )
            pools.append(objects[param.type_name])
        if any(not pool for pool in pools):
            continue
        param_names = [p.name for p in schema.params]
        for combo in product(*pools):
            binding = dict(zip(param_names, combo))
            cand = _bind(schema, binding, predicates, static_predicates, static_true)
            if cand is not None:
                candidates.append(cand)
    return candidates


def _bind(schema, binding, predicates, static_predicates, static_true):
    def ground(lit: Literal) -> tuple[str, tuple[str, ...]]:
        return lit.predicate, tuple(binding[a] for a in lit.args)

    pre_pos, pre_neg = [], []
    for lit in schema.preconditions:
        key = ground(lit)
        if lit.predicate in static_predicates:
            holds = key in static_true
            if lit.negated == holds:  # positive-but-false or negative-but-true
                return None
        elif lit.negated:
            pre_neg.append(key)
        else:
            pre_pos.append(key)

    add, delete = [], []
    for lit in schema.effects:
        key = ground(lit)
        if lit.predicate in static_predicates:
            raise GroundingError(
                f"predicate '{lit.predicate}' classified static but appears in an "
                f"effect of '{schema.name}'"
            )
        (delete if lit.negated else add).append(key)

    add_set = set(add)
    net_delete = [k for k in delete if k not in add_set]
    # Useless instance: everything it adds is already required true and it
    # deletes nothing that could be true (e.g. "move r x x" self-loops).
    if add_set <= set(pre_pos) and set(net_delete) <= set(pre_neg):
        return None

    args = tuple(binding[p.name] for p in schema.params)
    return _Candidate(
        name=_display(schema.name, args),
        pre_pos=pre_pos,
        pre_neg=pre_neg,
        add=add,
        delete=delete,
    )


def _mask(indices) -> int:
    mask = 0
    for i in indices:
        mask |= 1 << i
    return mask


def is_applicable(state: State, action: GroundAction) -> bool:
    """True iff all positive preconditions hold and no negative one does.

    Static preconditions were checked at grounding time, so only fluents
    remain here."""
    return (
        state.mask & action.pre_mask == action.pre_mask
        and state.mask & action.preneg_mask == 0
    )


class InapplicableActionError(Exception):
    def __init__(self, action: GroundAction):
        super().__init__(f"action '{action.name}' is not applicable")
        self.action = action


def apply_action(state: State, action: GroundAction) -> State:
    """Successor state (s \\ del) ∪ add; raises if the action is inapplicable."""
    if not is_applicable(state, action):
        raise InapplicableActionError(action)
    return State((state.mask & ~action.del_mask) | action.add_mask)


def goal_satisfied(state: State, task: GroundTask) -> bool:
    return state.mask & task.goal_mask == task.goal_mask


def missing_precondition(task: GroundTask, state: State, action: GroundAction) -> str | None:
    """Display form of the first violated precondition, or None if applicable."""
    for i in sorted(action.pre_pos):
        if i not in state:
            return task.atoms[i]
    for i in sorted(action.pre_neg):
        if i in state:
            return f"not {task.atoms[i]}"
    return None
