"""Split arithmetic, evaluation joins, and CLI end-to-end behavior."""

import json
import subprocess
import sys

import pytest

from symplan import generators
from symplan.generators import DatasetRecord
from symplan.harness import (
    REASON_MISSING,
    SplitSpec,
    evaluate_candidates,
    read_corpus,
    split_corpus,
    write_corpus,
)

from conftest import (
    DRIVERLOG_PROBLEM_PDDL,
    DRIVERLOG_TASK_STRING,
    GOLDEN_BW_PLAN,
    GOLDEN_BW_TASK_STRING,
)


def fake_corpus(n):
    return [
        DatasetRecord(
            id=f"id{i:05d}", domain="bw", task=f"task{i}", plan="p",
            plan_length=1, config={}, seed=i,
        )
        for i in range(n)
    ]


def test_split_18000_gives_14400_3600():
    records = fake_corpus(18_000)
    splits = split_corpus(records, SplitSpec(train_fraction=0.8, folds=5, seed=0))
    assert len(splits) == 5
    for train, test in splits:
        assert len(train) == 14_400
        assert len(test) == 3_600


def test_folds_partition_the_corpus():
    records = fake_corpus(101)
    splits = split_corpus(records, SplitSpec(folds=5, seed=1))
    test_ids = [frozenset(r.id for r in test) for _, test in splits]
    for i in range(len(test_ids)):
        for j in range(i + 1, len(test_ids)):
            assert not test_ids[i] & test_ids[j]
    union = frozenset().union(*test_ids)
    assert union == {r.id for r in records}
    for train, test in splits:
        assert {r.id for r in train} | set(
            r.id for r in test
        ) == {r.id for r in records}


def test_split_seeded_reproducible():
    records = fake_corpus(200)
    a = split_corpus(records, SplitSpec(folds=5, seed=7))
    b = split_corpus(records, SplitSpec(folds=5, seed=7))
    assert [[r.id for r in t] for _, t in a] == [[r.id for r in t] for _, t in b]
    c = split_corpus(records, SplitSpec(folds=5, seed=8))
    assert [[r.id for r in t] for _, t in a] != [[r.id for r in t] for _, t in c]


def test_repeats_mode():
    records = fake_corpus(100)
    splits = split_corpus(records, SplitSpec(train_fraction=0.8, repeats=3, seed=2))
    assert len(splits) == 3
    for train, test in splits:
        assert len(train) == 80 and len(test) == 20


def test_split_spec_validation():
    with pytest.raises(ValueError):
        SplitSpec(train_fraction=1.5)
    with pytest.raises(ValueError):
        SplitSpec(folds=0)


@pytest.fixture(scope="module")
def small_corpus():
    cfg = generators.GeneratorConfig(domain="bw", count=8, seed=21)
    return list(generators.build_dataset(cfg))


def test_evaluate_self_is_perfect(small_corpus):
    candidates = {r.id: r.plan for r in small_corpus}
    report, details = evaluate_candidates(small_corpus, candidates)
    row = report.rows["bw"]
    assert row.valid_pct == 100.0
    assert row.optimal_pct == 100.0
    assert row.bleu == pytest.approx(1.0)
    assert row.rouge_f == pytest.approx(1.0)
    assert len(details) == len(small_corpus)


def test_evaluate_missing_candidate_reported(small_corpus):
    candidates = {r.id: r.plan for r in small_corpus[1:]}
    report, details = evaluate_candidates(small_corpus, candidates)
    assert report.incomplete_reasons.get(REASON_MISSING) == 1
    assert details[0]["class"] == "incomplete"
    assert details[0]["reason"] == REASON_MISSING


def test_evaluate_row_count_matches_corpus(small_corpus):
    report, details = evaluate_candidates(small_corpus, {})
    assert report.rows["bw"].instance_count == len(small_corpus)


def test_corpus_file_roundtrip(tmp_path, small_corpus):
    path = tmp_path / "corpus.jsonl"
    write_corpus(small_corpus, path)
    assert read_corpus(path) == small_corpus


# ---------------------------------------------------------------------------
# CLI


def run_cli(*args, expect=0):
    proc = subprocess.run(
        [sys.executable, "-m", "symplan.cli", *args],
        capture_output=True, text=True,
    )
    assert proc.returncode == expect, proc.stderr
    return proc


def test_cli_generate_split_evaluate(tmp_path):
    corpus = tmp_path / "bw.jsonl"
    out = run_cli("generate", "--domain", "bw", "--count", "10", "--seed", "1",
                  "--out", str(corpus))
    assert "wrote 10 records" in out.stdout
    lines = corpus.read_text().strip().splitlines()
    assert len(lines) == 10

    again = tmp_path / "bw2.jsonl"
    run_cli("generate", "--domain", "bw", "--count", "10", "--seed", "1",
            "--out", str(again))
    assert corpus.read_bytes() == again.read_bytes()

    run_cli("split", str(corpus), "--folds", "5", "--seed", "0",
            "--out-dir", str(tmp_path / "splits"))
    fold0 = (tmp_path / "splits" / "fold0.test.jsonl").read_text().strip().splitlines()
    assert len(fold0) == 2

    candidates = tmp_path / "cand.jsonl"
    with open(candidates, "w") as handle:
        for line in lines:
            row = json.loads(line)
            handle.write(json.dumps({"id": row["id"], "plan": row["plan"]}) + "\n")
    report_path = tmp_path / "report.json"
    details_path = tmp_path / "details.jsonl"
    out = run_cli("evaluate", "--corpus", str(corpus), "--candidates", str(candidates),
                  "--out", str(report_path), "--details", str(details_path))
    report = json.loads(report_path.read_text())
    assert report["rows"]["bw"]["valid_pct"] == 100.0
    assert "Valid (%)" in out.stdout
    details = [json.loads(l) for l in details_path.read_text().splitlines()]
    assert len(details) == 10 and all(d["class"] == "valid" for d in details)


def test_cli_env_seed_default(tmp_path):
    import os

    a = tmp_path / "a.jsonl"
    b = tmp_path / "b.jsonl"
    env = dict(os.environ, SYMPLAN_SEED="42")
    proc = subprocess.run(
        [sys.executable, "-m", "symplan.cli", "generate", "--domain", "bw",
         "--count", "5", "--out", str(a)],
        capture_output=True, text=True, env=env,
    )
    assert proc.returncode == 0, proc.stderr
    run_cli("generate", "--domain", "bw", "--count", "5", "--seed", "42",
            "--out", str(b))
    assert a.read_bytes() == b.read_bytes()


def test_evaluate_parallel_matches_serial(small_corpus):
    candidates = {r.id: r.plan for r in small_corpus[:5]}
    serial, _ = evaluate_candidates(small_corpus, candidates, jobs=1)
    parallel, _ = evaluate_candidates(small_corpus, candidates, jobs=2)
    assert serial.rows["bw"].valid_pct == parallel.rows["bw"].valid_pct
    assert serial.raw_counts == parallel.raw_counts


def test_cli_generate_exhaustion_exit_code(tmp_path):
    out = run_cli("generate", "--domain", "bw", "--count", "7", "--seed", "1",
                  "--blocks", "2-2", "--out", str(tmp_path / "x.jsonl"), expect=1)
    assert "error" in out.stderr


def test_cli_solve_task_string():
    out = run_cli("solve", "--task", GOLDEN_BW_TASK_STRING)
    assert out.stdout.splitlines()[0].startswith("unstack b4 b2")
    assert "cost: 6" in out.stdout


def test_cli_solve_pddl_files(tmp_path, dl_domain):
    from symplan.domains import domain_source

    domain_file = tmp_path / "domain.pddl"
    domain_file.write_text(domain_source("dl"))
    problem_file = tmp_path / "problem.pddl"
    problem_file.write_text(DRIVERLOG_PROBLEM_PDDL)
    out = run_cli("solve", "--domain", str(domain_file), "--problem", str(problem_file))
    plan_line = out.stdout.splitlines()[0]
    out2 = run_cli("validate", "--domain", str(domain_file), "--problem",
                   str(problem_file), "--plan", plan_line)
    assert json.loads(out2.stdout.splitlines()[-1])["class"] == "valid"


def test_cli_solve_unsolvable_exit_2(tmp_path):
    from symplan.domains import domain_source

    domain_file = tmp_path / "domain.pddl"
    domain_file.write_text(domain_source("bw"))
    problem_file = tmp_path / "problem.pddl"
    problem_file.write_text("""
(define (problem imp) (:domain blocksworld) (:objects b1 b2)
  (:init (handempty) (ontable b1) (ontable b2) (clear b1) (clear b2))
  (:goal (and (on b1 b2) (on b2 b1))))
""")
    out = run_cli("solve", "--domain", str(domain_file), "--problem",
                  str(problem_file), expect=2)
    assert "unsolvable" in out.stdout


def test_cli_validate_golden_pairs():
    out = run_cli("validate", "--task", GOLDEN_BW_TASK_STRING, "--plan", GOLDEN_BW_PLAN,
                  "--reference-cost", "6")
    data = json.loads(out.stdout.splitlines()[-1])
    assert data["class"] == "valid" and data["optimal"] is True

    out = run_cli("validate", "--task", GOLDEN_BW_TASK_STRING,
                  "--plan", "unstack b4 b2, put-down b4, pick-up")
    data = json.loads(out.stdout.splitlines()[-1])
    assert data["class"] == "incomplete"

    out = run_cli("validate", "--task", GOLDEN_BW_TASK_STRING,
                  "--plan", "complete garbage ,,, 42")
    data = json.loads(out.stdout.splitlines()[-1])
    assert data["class"] in {"failed", "incomplete"}


def test_cli_convert_roundtrip(tmp_path):
    from symplan.domains import domain_source

    domain_file = tmp_path / "domain.pddl"
    domain_file.write_text(domain_source("dl"))
    problem_file = tmp_path / "problem.pddl"
    problem_file.write_text(DRIVERLOG_PROBLEM_PDDL)
    out = run_cli("convert", "--to-linearized", "--domain", str(domain_file),
                  "--problem", str(problem_file))
    assert out.stdout.strip() == DRIVERLOG_TASK_STRING

    task_file = tmp_path / "task.txt"
    task_file.write_text(out.stdout.strip())
    out_domain = tmp_path / "re-domain.pddl"
    out_problem = tmp_path / "re-problem.pddl"
    run_cli("convert", "--to-pddl", "--task-file", str(task_file),
            "--out-domain", str(out_domain), "--out-problem", str(out_problem))
    # emitted PDDL canonicalizes init order, so the composite converges after
    # one step: PDDL -> task -> PDDL must be an exact fixpoint from here on
    from symplan import pddl

    domain2 = pddl.parse_domain(out_domain.read_text())
    problem2 = pddl.parse_problem(out_problem.read_text(), domain2)
    original = pddl.parse_problem(DRIVERLOG_PROBLEM_PDDL, domain2)
    assert set(problem2.objects) == set(original.objects)
    assert set(problem2.init) == set(original.init)
    assert set(problem2.goal) == set(original.goal)
    out2 = run_cli("convert", "--to-linearized", "--domain", str(out_domain),
                   "--problem", str(out_problem))
    task2 = tmp_path / "task2.txt"
    task2.write_text(out2.stdout.strip())
    out_domain3 = tmp_path / "re3-domain.pddl"
    out_problem3 = tmp_path / "re3-problem.pddl"
    run_cli("convert", "--to-pddl", "--task-file", str(task2),
            "--out-domain", str(out_domain3), "--out-problem", str(out_problem3))
    assert out_domain3.read_text() == out_domain.read_text()
    assert out_problem3.read_text() == out_problem.read_text()


def test_cli_convert_without_registry_warns(tmp_path):
    task_file = tmp_path / "task.txt"
    task_file.write_text(
        "<GOAL> p a <INIT> q a <ACTION> act <PRE> q x <EFFECT> p x, not q x"
    )
    out = run_cli("convert", "--to-pddl", "--task-file", str(task_file))
    assert "untyped" in out.stderr
    assert "(define (domain reconstructed)" in out.stdout


def test_cli_unknown_input_errors(tmp_path):
    run_cli("solve", "--task", "garbage without tags", expect=1)
