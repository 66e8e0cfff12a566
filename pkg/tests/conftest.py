"""Shared fixtures: golden task strings and benchmark instances used across
the suite.  The long strings are frozen test vectors; tests compare against
them byte for byte."""

import pytest

from symplan import grounding, pddl
from symplan.domains import load_domain

# Four-block instance: two towers (b1 alone; b4 on b2 on b3), goal one tower
# b4-b1-b2-b3.  Optimal cost 6.
GOLDEN_BW_PROBLEM_PDDL = """
(define (problem golden-bw)
  (:domain blocksworld)
  (:objects b1 b2 b3 b4)
  (:init (handempty) (ontable b1) (clear b1) (on b2 b3) (ontable b3)
         (on b4 b2) (clear b4))
  (:goal (and (on b1 b2) (on b2 b3) (ontable b3) (on b4 b1) (clear b4)))
)
"""

GOLDEN_BW_TASK_STRING = (
    "<GOAL> on b1 b2, on b2 b3, ontable b3, on b4 b1, clear b4 "
    "<INIT> handempty, ontable b1, clear b1, on b2 b3, ontable b3, on b4 b2, clear b4 "
    "<ACTION> pick-up "
    "<PRE> clear x, ontable x, handempty "
    "<EFFECT> not ontable x, not clear x, not handempty, holding x "
    "<ACTION> put-down "
    "<PRE> holding x "
    "<EFFECT> not holding x, clear x, handempty, ontable x "
    "<ACTION> stack "
    "<PRE> holding x, clear y "
    "<EFFECT> not holding x, not clear y, clear x, handempty, on x y "
    "<ACTION> unstack "
    "<PRE> on x y, clear x, handempty "
    "<EFFECT> holding x, clear y, not clear x, not handempty, not on x y"
)

GOLDEN_BW_PLAN = "unstack b4 b2, put-down b4, pick-up b1, stack b1 b2, pick-up b4, stack b4 b1"

# Three-location driverlog instance; the task string below is its exact
# linearization.
DRIVERLOG_PROBLEM_PDDL = """
(define (problem problem_3_2_4_34291)
  (:domain driverlog)
  (:objects
    driver1 driver2 driver3 - driver
    truck1 truck2 - truck
    package1 package2 package3 package4 - obj
    s1 s2 s3 - location
  )
  (:init
    (at driver1 s3)
    (at driver2 s3)
    (at driver3 s3)
    (at truck1 s3)
    (empty truck1)
    (at truck2 s3)
    (empty truck2)
    (link s1 s2)
    (link s2 s1)
    (link s2 s3)
    (link s3 s2)
    (link s3 s1)
    (link s1 s3)
    (at package1 s3)
    (at package2 s3)
    (at package3 s2)
    (at package4 s1)
  )
  (:goal (and
    (at package1 s1)
    (at package2 s3)
    (at package3 s3)
    (at package4 s3)
  ))
)
"""

DRIVERLOG_TASK_STRING = (
    "<GOAL> at package1 s1, at package2 s3, at package3 s3, at package4 s3 "
    "<INIT> at driver1 s3, at driver2 s3, at driver3 s3, at truck1 s3, empty truck1, "
    "at truck2 s3, empty truck2, link s1 s2, link s2 s1, link s2 s3, link s3 s2, "
    "link s3 s1, link s1 s3, at package1 s3, at package2 s3, at package3 s2, "
    "at package4 s1 "
    "<ACTION> load-truck "
    "<PRE> at truck loc, at obj loc "
    "<EFFECT> not at obj loc, in obj truck "
    "<ACTION> unload-truck "
    "<PRE> at truck loc, in obj truck "
    "<EFFECT> not in obj truck, at obj loc "
    "<ACTION> board-truck "
    "<PRE> at truck loc, at driver loc, empty truck "
    "<EFFECT> not at driver loc, driving driver truck, not empty truck "
    "<ACTION> disembark-truck "
    "<PRE> at truck loc, driving driver truck "
    "<EFFECT> not driving driver truck, at driver loc, empty truck "
    "<ACTION> drive-truck "
    "<PRE> at truck loc-from, driving driver truck, link loc-from loc-to "
    "<EFFECT> not at truck loc-from, at truck loc-to "
    "<ACTION> walk "
    "<PRE> at driver loc-from, path loc-from loc-to "
    "<EFFECT> not at driver loc-from, at driver loc-to"
)

# Inverted-tower instance (b2 on b4 on b1 on b3) behind the "failed plan"
# exhibit: the generation repeats put-down b4 while holding b1 at step 6.
FAILED_EXHIBIT_PROBLEM_PDDL = """
(define (problem failed-exhibit)
  (:domain blocksworld)
  (:objects b1 b2 b3 b4)
  (:init (handempty) (on b1 b3) (on b2 b4) (clear b2) (ontable b3) (on b4 b1))
  (:goal (and (ontable b1) (on b2 b1) (ontable b3) (clear b3) (on b4 b2) (clear b4)))
)
"""

FAILED_EXHIBIT_REFERENCE = (
    "unstack b2 b4, put-down b2, unstack b4 b1, put-down b4, unstack b1 b3, "
    "put-down b1, pick-up b2, stack b2 b1, pick-up b4, stack b4 b2"
)

FAILED_EXHIBIT_GENERATION = (
    "unstack b2 b4, put-down b2, unstack b4 b1, put-down b4, unstack b1 b3, "
    "put-down b4, unstack b4 b1, put-down b4, unstack b1 b3, put-down b4, "
    "unstack b4 b2, put-down b4, unstack b2 b4, stack b2 b1, pick-up b4, stack b4 b2"
)

# Instance behind the "incomplete generations" exhibit: the generation stops
# mid-action after two complete steps.
INCOMPLETE_EXHIBIT_PROBLEM_PDDL = """
(define (problem incomplete-exhibit)
  (:domain blocksworld)
  (:objects b1 b2 b3 b4)
  (:init (handempty) (on b1 b3) (clear b1) (ontable b2) (clear b2)
         (ontable b3) (ontable b4) (clear b4))
  (:goal (and (ontable b1) (ontable b2) (clear b2) (ontable b3) (clear b3)
              (on b4 b1) (clear b4)))
)
"""

INCOMPLETE_EXHIBIT_REFERENCE = "unstack b1 b3, put-down b1, pick-up b4, stack b4 b1"
INCOMPLETE_EXHIBIT_GENERATION = "unstack b1 b3, put-down b1, pick-up"


@pytest.fixture(scope="session")
def bw_domain():
    return load_domain("bw")


@pytest.fixture(scope="session")
def golden_bw_problem(bw_domain):
    return pddl.parse_problem(GOLDEN_BW_PROBLEM_PDDL, bw_domain)


@pytest.fixture(scope="session")
def golden_bw_task(bw_domain, golden_bw_problem):
    return grounding.ground_task(bw_domain, golden_bw_problem)


@pytest.fixture(scope="session")
def dl_domain():
    return load_domain("dl")


@pytest.fixture(scope="session")
def dl_problem(dl_domain):
    return pddl.parse_problem(DRIVERLOG_PROBLEM_PDDL, dl_domain)
