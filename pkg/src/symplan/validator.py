"""VAL-style validation of candidate plan strings.

Classification follows the three-way taxonomy: a plan containing an action
that is impossible in its state (unknown or with a violated precondition) is
*failed*; an executable plan that does not reach the goal, or a generation cut
off mid-action, is *incomplete*; everything else is *valid*, with optimality
judged by length against a reference cost when one is supplied.
"""

from __future__ import annotations

from dataclasses import dataclass

from .codec import ParsedPlan, parse_plan_text
from .grounding import (
    GroundTask,
    State,
    apply_action,
    goal_satisfied,
    is_applicable,
    missing_precondition,
)

VALID = "valid"
FAILED = "failed"
INCOMPLETE = "incomplete"

REASON_TRUNCATED = "truncated"
REASON_GOAL_NOT_REACHED = "goal_not_reached"
REASON_UNKNOWN_ACTION = "unknown_action"


@dataclass(frozen=True, slots=True)
class PlanOutcome:
    kind: str  # valid | failed | incomplete
    executed_prefix: int
    optimal: bool | None = None  # valid plans only, and only with a reference cost
    step: int | None = None  # failed plans: 1-based index of the impossible action
    violated: str | None = None  # failed plans: violated precondition or unknown chunk
    reason: str | None = None  # incomplete plans
    candidate_cost: int | None = None
    earliest_goal_prefix: int | None = None  # valid plans: shortest goal-reaching prefix

    def to_json(self) -> dict:
        out: dict = {"class": self.kind}
        if self.kind == VALID:
            if self.optimal is not None:
                out["optimal"] = self.optimal
            out["cost"] = self.candidate_cost
        elif self.kind == FAILED:
            out["step"] = self.step
            out["violated"] = self.violated
        else:
            out["reason"] = self.reason
        out["executed_prefix"] = self.executed_prefix
        return out


def simulate_plan(task: GroundTask, parsed: ParsedPlan) -> tuple[State, int | None, str | None]:
    """Apply actions sequentially from init.

    Returns (final state, 1-based index of the first impossible step or None,
    description of what made it impossible).  Simulation stops at the first
    unknown or inapplicable action."""
    state = task.init
    for step, (chunk, action) in enumerate(parsed.entries, start=1):
        if action is None:
            return state, step, f"unknown action: {chunk}"
        if not is_applicable(state, action):
            return state, step, missing_precondition(task, state, action)
        state = apply_action(state, action)
    return state, None, None


def classify_plan(
    task: GroundTask,
    text: str,
    reference_cost: int | None = None,
) -> PlanOutcome:
    """Classify arbitrary plan text against a task; never raises on bad input."""
    parsed = parse_plan_text(text, task)
    state = task.init
    earliest = 0 if goal_satisfied(state, task) else None
    for step, (chunk, action) in enumerate(parsed.entries, start=1):
        if action is None:
            return PlanOutcome(
                FAILED, executed_prefix=step - 1, step=step,
                violated=f"unknown action: {chunk}", reason=REASON_UNKNOWN_ACTION,
            )
        if not is_applicable(state, action):
            return PlanOutcome(
                FAILED, executed_prefix=step - 1, step=step,
                violated=missing_precondition(task, state, action),
            )
        state = apply_action(state, action)
        if earliest is None and goal_satisfied(state, task):
            earliest = step

    executed = len(parsed.entries)
    if parsed.truncated:
        return PlanOutcome(INCOMPLETE, executed_prefix=executed, reason=REASON_TRUNCATED)
    if not goal_satisfied(state, task):
        return PlanOutcome(INCOMPLETE, executed_prefix=executed,
                           reason=REASON_GOAL_NOT_REACHED)
    optimal = None if reference_cost is None else executed == reference_cost
    return PlanOutcome(
        VALID, executed_prefix=executed, optimal=optimal,
        candidate_cost=executed, earliest_goal_prefix=earliest,
    )
