import pytest

from crowdcorrect.crowd import (
    IDENTIFICATION,
    SUGGESTION,
    MicroTask,
    TaskBoard,
    generate_identification_tasks,
)
from crowdcorrect.simcrowd import (
    WRONG_FREE_TEXT,
    TruthOracle,
    WorkerModel,
    run_simulation,
    simulate_answer,
)

from conftest import make_post


def binary_task(task_id="i:p", post_id="p", quorum=5):
    return MicroTask(
        task_id=task_id, kind=IDENTIFICATION, post_id=post_id, prompt="?",
        options=("health", "other"), allows_free_text=False, quorum=quorum,
    )


def test_accuracy_one_always_truth():
    model = WorkerModel("w", accuracy=1.0, rng_seed=1)
    task = binary_task()
    for _ in range(100):
        assert simulate_answer(task, "health", model).choice == ("option", 0)


def test_accuracy_zero_never_truth():
    model = WorkerModel("w", accuracy=0.0, rng_seed=1)
    task = binary_task()
    for _ in range(100):
        assert simulate_answer(task, "health", model).choice == ("option", 1)


def test_empirical_rate_matches_accuracy():
    model = WorkerModel("w", accuracy=0.8, rng_seed=99)
    task = binary_task()
    hits = sum(
        simulate_answer(task, "health", model).choice == ("option", 0)
        for _ in range(10_000)
    )
    assert abs(hits / 10_000 - 0.8) <= 0.01  # binomial sd ~ 0.004


def test_same_seed_same_stream():
    draws1 = [simulate_answer(binary_task(), "health", WorkerModel("w", 0.5, 7)).choice
              for _ in range(50)]
    draws2 = [simulate_answer(binary_task(), "health", WorkerModel("w", 0.5, 7)).choice
              for _ in range(50)]
    assert draws1 == draws2


def test_streams_differ_per_worker():
    a = [simulate_answer(binary_task(), "health", WorkerModel("a", 0.5, 7)).choice
         for _ in range(50)]
    b = [simulate_answer(binary_task(), "health", WorkerModel("b", 0.5, 7)).choice
         for _ in range(50)]
    assert a != b


def test_free_text_truth_outside_options():
    task = MicroTask(
        task_id="c:f", kind="correction", post_id="p", feature_id="f", prompt="?",
        options=("hospice",), allows_free_text=True, quorum=1, surface="Hosp.",
    )
    model = WorkerModel("w", accuracy=1.0, rng_seed=3)
    assert simulate_answer(task, "hospital", model).choice == ("text", "hospital")


def test_fixed_wrong_free_text_for_optionless_task():
    task = MicroTask(
        task_id="c:f", kind="correction", post_id="p", feature_id="f", prompt="?",
        options=(), allows_free_text=True, quorum=1,
    )
    model = WorkerModel("w", accuracy=0.0, rng_seed=3)
    assert simulate_answer(task, "hospital", model).choice == ("text", WRONG_FREE_TEXT)


def test_invalid_truth_rejected():
    with pytest.raises(ValueError):
        simulate_answer(binary_task(), "banana", WorkerModel("w", 1.0, 1))


def test_truth_oracle_fallbacks():
    oracle = TruthOracle.from_rows([("identification", "p", "health")])
    assert oracle.truth_for(binary_task()) == "health"
    suggestion = MicroTask(
        task_id="s:f", kind=SUGGESTION, post_id="p", feature_id="f", prompt="?",
        options=("jargon", "abbreviation", "misspelling", "none"),
        allows_free_text=False, quorum=1, surface="word",
    )
    assert oracle.truth_for(suggestion) == "none"  # unlisted features are clean


def test_run_simulation_trivial_quorum_one():
    board = TaskBoard()
    posts = [make_post(f"p{i}", f"text number {i}") for i in range(10)]
    board.add_tasks(generate_identification_tasks(posts, "health", quorum=1))
    oracle = TruthOracle.from_rows(
        [("identification", f"p{i}", "health") for i in range(10)]
    )
    result = run_simulation(board, oracle, n_workers=3, accuracy=1.0, seed=5)
    assert result["resolution_rate"] == 1.0
    assert result["accuracy_of_winners"] == 1.0
    assert result["answers_spent"] == 10


def test_run_simulation_deterministic():
    def go():
        board = TaskBoard()
        posts = [make_post(f"p{i}", f"text number {i}") for i in range(20)]
        board.add_tasks(generate_identification_tasks(posts, "health", quorum=3))
        oracle = TruthOracle.from_rows(
            [("identification", f"p{i}", "health") for i in range(20)]
        )
        return run_simulation(board, oracle, n_workers=5, accuracy=0.7, seed=11)

    assert go() == go()
