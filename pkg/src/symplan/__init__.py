"""symplan: classical-planning benchmark tooling.

Parsing and grounding of the STRIPS/typing PDDL fragment, optimal A* search
with the LM-cut heuristic, the tagged single-string task encoding, VAL-style
plan validation, ROUGE-L/BLEU scoring, and dataset generation for the
blocksworld, hanoi, grippers, and driverlog benchmark domains.
"""

from .pddl import (
    ActionSchema,
    Domain,
    Literal,
    PddlError,
    PredicateSchema,
    Problem,
    TypedObject,
    emit_domain,
    emit_problem,
    parse_domain,
    parse_problem,
)
from .grounding import (
    GroundAction,
    GroundTask,
    State,
    apply_action,
    goal_satisfied,
    ground_task,
    is_applicable,
)
from .codec import (
    LinearizedTask,
    PlanText,
    decode_task,
    encode_plan,
    encode_task,
    parse_plan_text,
)
from .search import SearchResult, astar_plan, bfs_oracle, h_lmcut, h_max
from .validator import PlanOutcome, classify_plan, simulate_plan
from .metrics import EvalReport, aggregate_report, bleu, rouge_l, tokenize_plan
from .generators import DatasetRecord, GeneratorConfig, build_dataset

__version__ = "0.1.0"

__all__ = [
    "ActionSchema", "Domain", "Literal", "PddlError", "PredicateSchema",
    "Problem", "TypedObject", "emit_domain", "emit_problem", "parse_domain",
    "parse_problem", "GroundAction", "GroundTask", "State", "apply_action",
    "goal_satisfied", "ground_task", "is_applicable", "LinearizedTask",
    "PlanText", "decode_task", "encode_plan", "encode_task", "parse_plan_text",
    "SearchResult", "astar_plan", "bfs_oracle", "h_lmcut", "h_max",
    "PlanOutcome", "classify_plan", "simulate_plan", "EvalReport",
    "aggregate_report", "bleu", "rouge_l", "tokenize_plan", "DatasetRecord",
    "GeneratorConfig", "build_dataset",
]
