"""Parser, printer, and roundtrip tests for the PDDL front end."""

import pytest

from symplan import pddl
from symplan.domains import DOMAIN_TAGS, domain_source

from conftest import DRIVERLOG_PROBLEM_PDDL


def test_driverlog_domain_has_six_schemas(dl_domain):
    names = [a.name for a in dl_domain.actions]
    assert names == [
        "load-truck", "unload-truck", "board-truck",
        "disembark-truck", "drive-truck", "walk",
    ]


def test_empty_domain():
    domain = pddl.parse_domain("(define (domain empty) (:predicates))")
    assert domain.name == "empty"
    assert domain.predicates == ()
    assert domain.actions == ()


def test_roundtrip_all_bundled_domains():
    for tag in DOMAIN_TAGS:
        domain = pddl.parse_domain(domain_source(tag))
        reparsed = pddl.parse_domain(pddl.emit_domain(domain))
        assert pddl.domains_equal(domain, reparsed), tag


def test_problem_counts(dl_domain, dl_problem):
    assert len(dl_problem.objects) == 12
    # counted directly from the listing: 3 driver + 2+2 truck + 6 link + 4 package
    assert len(dl_problem.init) == 17
    assert len(dl_problem.goal) == 4


def test_problem_roundtrip(dl_domain, dl_problem, bw_domain, golden_bw_problem):
    for domain, problem in ((dl_domain, dl_problem), (bw_domain, golden_bw_problem)):
        reparsed = pddl.parse_problem(pddl.emit_problem(problem), domain)
        assert pddl.problems_equal(problem, reparsed)


def test_generated_problems_roundtrip():
    import random

    from symplan import generators
    from symplan.domains import load_domain

    cases = [
        ("bw", dict(blocks=4)),
        ("hn", dict(disks=4)),
        ("gr", dict(balls=3, robots=3, rooms=3)),
        ("dl", dict(drivers=2, trucks=2, packages=3, locations=4)),
    ]
    for tag, kwargs in cases:
        domain = load_domain(tag)
        for seed in range(5):
            problem = generators.generate_problem(tag, kwargs, random.Random(seed))
            reparsed = pddl.parse_problem(pddl.emit_problem(problem), domain)
            assert pddl.problems_equal(problem, reparsed), (tag, seed)


def test_emit_problem_is_fixpoint(dl_domain, dl_problem):
    emitted = pddl.emit_problem(dl_problem)
    assert pddl.emit_problem(pddl.parse_problem(emitted, dl_domain)) == emitted


def test_empty_goal_problem(bw_domain):
    text = """(define (problem p) (:domain blocksworld) (:objects b1)
               (:init (ontable b1)) (:goal (and)))"""
    problem = pddl.parse_problem(text, bw_domain)
    assert problem.goal == ()
    assert "(:goal (and" in pddl.emit_problem(problem)


def test_duplicate_init_atoms_deduplicated(bw_domain):
    text = """(define (problem p) (:domain blocksworld) (:objects b1)
               (:init (ontable b1) (ontable b1) (clear b1)) (:goal (and)))"""
    problem = pddl.parse_problem(text, bw_domain)
    assert len(problem.init) == 2


def test_case_insensitive_identifiers(dl_domain):
    upper = DRIVERLOG_PROBLEM_PDDL.upper()
    problem = pddl.parse_problem(upper, dl_domain)
    assert pddl.problems_equal(problem, pddl.parse_problem(DRIVERLOG_PROBLEM_PDDL, dl_domain))


def test_syntax_error_reports_location():
    with pytest.raises(pddl.PddlSyntaxError) as err:
        pddl.parse_domain("(define (domain broken)\n  (:predicates (p ?x)")
    assert err.value.line >= 1 and err.value.column >= 1
    with pytest.raises(pddl.PddlSyntaxError) as err:
        pddl.parse_domain("(define (domain d) (:predicates))\nextra")
    assert err.value.line == 2


def test_adl_constructs_rejected():
    base = """(define (domain d) (:predicates (p ?x) (q ?x))
               (:action a :parameters (?x) :precondition {pre} :effect (p ?x)))"""
    for construct in (
        "(or (p ?x) (q ?x))",
        "(exists (?y) (p ?y))",
        "(forall (?y) (p ?y))",
        "(imply (p ?x) (q ?x))",
    ):
        with pytest.raises(pddl.UnsupportedConstructError):
            pddl.parse_domain(base.format(pre=construct))
    with pytest.raises(pddl.UnsupportedConstructError):
        pddl.parse_domain(
            """(define (domain d) (:predicates (p ?x) (q ?x))
                (:action a :parameters (?x) :precondition (p ?x)
                         :effect (when (p ?x) (q ?x))))"""
        )


def test_unsupported_requirement_rejected():
    with pytest.raises(pddl.UnsupportedConstructError):
        pddl.parse_domain("(define (domain d) (:requirements :adl) (:predicates))")


def test_undeclared_predicate_rejected():
    with pytest.raises(pddl.PddlValidationError):
        pddl.parse_domain(
            """(define (domain d) (:predicates (p ?x))
                (:action a :parameters (?x) :precondition (q ?x) :effect (p ?x)))"""
        )


def test_unbound_variable_rejected():
    with pytest.raises(pddl.PddlValidationError):
        pddl.parse_domain(
            """(define (domain d) (:predicates (p ?x))
                (:action a :parameters (?x) :precondition (p ?y) :effect (p ?x)))"""
        )


def test_contradictory_effect_rejected():
    with pytest.raises(pddl.PddlValidationError):
        pddl.parse_domain(
            """(define (domain d) (:predicates (p ?x))
                (:action a :parameters (?x) :precondition (p ?x)
                         :effect (and (p ?x) (not (p ?x)))))"""
        )


def test_negated_goal_rejected(bw_domain):
    text = """(define (problem p) (:domain blocksworld) (:objects b1)
               (:init (ontable b1)) (:goal (and (not (ontable b1)))))"""
    with pytest.raises(pddl.PddlValidationError):
        pddl.parse_problem(text, bw_domain)


def test_domain_name_mismatch(bw_domain):
    text = """(define (problem p) (:domain hanoi) (:init) (:goal (and)))"""
    with pytest.raises(pddl.PddlValidationError):
        pddl.parse_problem(text, bw_domain)


def test_undeclared_object_rejected(bw_domain):
    text = """(define (problem p) (:domain blocksworld) (:objects b1)
               (:init (ontable b2)) (:goal (and)))"""
    with pytest.raises(pddl.PddlValidationError):
        pddl.parse_problem(text, bw_domain)


def test_type_cycle_rejected():
    with pytest.raises(pddl.PddlValidationError):
        pddl.parse_domain(
            "(define (domain d) (:requirements :typing) (:types a - b b - a) (:predicates))"
        )
