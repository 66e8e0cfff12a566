"""Heuristics and search: values, admissibility, dominance, optimality."""

import math
import os
import random
from unittest import mock

import pytest

from symplan import generators, grounding, pddl, search
from symplan.domains import load_domain
from symplan.grounding import State, apply_action, ground_task, is_applicable
from symplan.pddl import Problem, TypedObject


def hanoi_tower_problem(n, src=0, dst=2):
    init = generators._hanoi_smaller_atoms(n) + generators._hanoi_placement_atoms((src,) * n)
    goal = generators._hanoi_placement_atoms((dst,) * n)
    objects = tuple(TypedObject(f"d{i}") for i in range(1, n + 1)) + tuple(
        TypedObject(p) for p in generators.PEGS
    )
    return Problem(f"tower-{n}", "hanoi", objects, tuple(init), tuple(goal))


def random_task(tag, seed):
    rng = random.Random(seed)
    values = generators.GeneratorConfig(domain=tag, count=1, seed=0).sample_values(rng)
    problem = generators.generate_problem(tag, values, rng)
    return ground_task(load_domain(tag), problem)


def test_hmax_zero_at_goal(golden_bw_task):
    res = search.bfs_oracle(golden_bw_task)
    final = golden_bw_task.init
    for action in res.plan:
        final = apply_action(final, action)
    assert search.h_max(golden_bw_task, final) == 0
    assert search.h_lmcut(golden_bw_task, final) == 0


def test_hmax_golden_bw_in_range(golden_bw_task):
    value = search.h_max(golden_bw_task, golden_bw_task.init)
    assert 1 <= value <= 6


def test_heuristics_infinite_on_unreachable_goal(bw_domain):
    text = """(define (problem p) (:domain blocksworld) (:objects b1)
               (:init (ontable b1) (clear b1)) (:goal (and (holding b1))))"""
    task = ground_task(bw_domain, pddl.parse_problem(text, bw_domain))
    assert search.h_max(task, task.init) == math.inf
    assert search.h_lmcut(task, task.init) == math.inf


def test_lmcut_hanoi_tower3():
    task = ground_task(load_domain("hn"), hanoi_tower_problem(3))
    hm = search.h_max(task, task.init)
    lm = search.h_lmcut(task, task.init)
    assert hm <= lm <= 7  # oracle cost for the 3-disk tower is 7


def test_astar_golden_bw_cost6(golden_bw_task):
    res = search.astar_plan(golden_bw_task)
    assert res.status == search.SOLVED
    assert res.cost == 6
    assert search.bfs_oracle(golden_bw_task).cost == 6


@pytest.mark.parametrize("n,expected", [(2, 3), (3, 7), (4, 15), (5, 31)])
def test_hanoi_tower_costs(n, expected):
    task = ground_task(load_domain("hn"), hanoi_tower_problem(n))
    assert search.astar_plan(task).cost == expected
    assert search.bfs_oracle(task).cost == expected


def test_astar_unsolvable_mutual_stacking(bw_domain):
    text = """(define (problem p) (:domain blocksworld) (:objects b1 b2)
               (:init (handempty) (ontable b1) (ontable b2) (clear b1) (clear b2))
               (:goal (and (on b1 b2) (on b2 b1))))"""
    task = ground_task(bw_domain, pddl.parse_problem(text, bw_domain))
    assert search.astar_plan(task).status == search.UNSOLVABLE


def test_bfs_oracle_trivial_goal(bw_domain):
    text = """(define (problem p) (:domain blocksworld) (:objects b1)
               (:init (handempty) (ontable b1) (clear b1))
               (:goal (and (ontable b1))))"""
    task = ground_task(bw_domain, pddl.parse_problem(text, bw_domain))
    res = search.bfs_oracle(task)
    assert res.cost == 0 and res.plan == ()


def test_resource_limit(golden_bw_task):
    res = search.astar_plan(golden_bw_task, max_expansions=1)
    assert res.status == search.RESOURCE_LIMIT


def test_astar_returns_validating_plans():
    for tag, seed in [("bw", 0), ("hn", 1), ("gr", 2), ("dl", 3)]:
        task = random_task(tag, seed)
        res = search.astar_plan(task)
        assert res.status == search.SOLVED
        state = task.init
        for action in res.plan:
            assert is_applicable(state, action)
            state = apply_action(state, action)
        assert grounding.goal_satisfied(state, task)


def test_astar_matches_oracle_on_random_instances():
    for tag in ("bw", "hn", "gr", "dl"):
        for seed in range(8):
            task = random_task(tag, 100 + seed)
            a = search.astar_plan(task)
            o = search.bfs_oracle(task, max_expansions=200_000)
            if o.status == search.SOLVED:
                assert a.cost == o.cost, (tag, seed)


def test_hmax_dominated_by_lmcut_and_admissible():
    rng = random.Random(5)
    for tag in ("bw", "hn", "gr"):
        task = random_task(tag, 55)
        oracle = search.bfs_oracle(task, max_expansions=200_000)
        state = task.init
        for _ in range(12):
            hm = search.h_max(task, state)
            lm = search.h_lmcut(task, state)
            assert hm <= lm
            remaining = search.bfs_oracle(
                grounding.GroundTask(
                    task.domain_name, task.problem_name, task.atoms, task.actions,
                    state, task.goal, task.goal_mask, task.statics,
                    task.schema_arities, task.unsolvable,
                ),
                max_expansions=200_000,
            )
            if remaining.status == search.SOLVED:
                assert lm <= remaining.cost
            apps = [a for a in task.actions if is_applicable(state, a)]
            if not apps:
                break
            state = apply_action(state, rng.choice(apps))


def test_fast_and_pure_heuristics_agree():
    if not search._use_kernels():
        pytest.skip("numba unavailable")
    rng = random.Random(9)
    for tag in ("bw", "hn", "gr", "dl"):
        task = random_task(tag, 77)
        fast_h = search.LmcutEvaluator(task)
        fast_m = search.HmaxEvaluator(task)
        with mock.patch.dict(os.environ, {"SYMPLAN_PURE": "1"}):
            pure_h = search.LmcutEvaluator(task)
            pure_m = search.HmaxEvaluator(task)
        state = task.init
        for _ in range(10):
            assert fast_h(state.mask) == pure_h(state.mask)
            assert fast_m(state.mask) == pure_m(state.mask)
            apps = [a for a in task.actions if is_applicable(state, a)]
            if not apps:
                break
            state = apply_action(state, rng.choice(apps))


def test_fast_and_pure_astar_agree_on_cost():
    if not search._use_kernels():
        pytest.skip("numba unavailable")
    for tag in ("bw", "hn", "gr", "dl"):
        task = random_task(tag, 31)
        fast = search.astar_plan(task)
        with mock.patch.dict(os.environ, {"SYMPLAN_PURE": "1"}):
            pure = search.astar_plan(task)
        assert fast.cost == pure.cost


def test_astar_deterministic():
    task = random_task("gr", 12)
    r1 = search.astar_plan(task)
    r2 = search.astar_plan(task)
    assert [a.name for a in r1.plan] == [a.name for a in r2.plan]
    assert r1.expansions == r2.expansions


def test_sampled_expanded_states_belong_to_task():
    task = random_task("gr", 13)
    res = search.astar_plan(task, sample_expanded=16)
    assert res.status == search.SOLVED
    for state in res.sampled_states:
        assert isinstance(state, State)
        assert state.mask < (1 << len(task.atoms))


def test_unsolvable_marker_short_circuits(bw_domain):
    text = """(define (problem p) (:domain blocksworld) (:objects b1 b2)
               (:init (ontable b1) (ontable b2) (clear b1) (clear b2))
               (:goal (and (holding b1))))"""
    task = ground_task(bw_domain, pddl.parse_problem(text, bw_domain))
    assert task.unsolvable
    assert search.astar_plan(task).status == search.UNSOLVABLE
    assert search.bfs_oracle(task).status == search.UNSOLVABLE
