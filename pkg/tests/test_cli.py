import pytest

from helpers import fixture
from reconsched.cli import main


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def five_task_args():
    return ["--tasks", fixture("five_tasks.csv"), "--messages", fixture("five_messages.csv"),
            "--platform", fixture("two_es_platform.csv")]


def eight_task_args():
    return ["--tasks", fixture("eight_tasks.csv"), "--platform", fixture("six_es_platform.csv")]


def test_schedule_fixture(tmp_path, capsys):
    out = tmp_path / "s.txt"
    code, stdout, _ = run(capsys, "schedule", *five_task_args(), "--out", out, "--log-out", tmp_path / "s.log",
                          "--metrics", tmp_path / "m.json")
    assert code == 0
    assert "safety check: OK" in stdout
    assert out.read_text().endswith("makespan,76\n")
    assert (tmp_path / "s.log").read_bytes().startswith(b"RLOG")
    assert '"makespan": 76' in (tmp_path / "m.json").read_text()


def test_schedule_to_stdout(capsys):
    code, stdout, err = run(capsys, "schedule", *five_task_args(), "--profile", "energy")
    assert code == 0 and stdout.startswith("TASKS:")
    assert "profile=energy" in err


def test_schedule_on_forward_routes(capsys):
    # the platform only has forward routes, so the placement is pinned onto them
    code, stdout, _ = run(capsys, "schedule", "--tasks", fixture("five_tasks.csv"),
                          "--platform", fixture("forward_routes_platform.csv"),
                          "--priorities", fixture("forward_priorities.txt"))
    assert code == 0
    assert "1,3,ES1>R1," in stdout and "3,5,ES5>R3," in stdout


def test_route_gap_is_input_error(capsys):
    code, _, err = run(capsys, "schedule", "--tasks", fixture("five_tasks.csv"),
                       "--platform", fixture("forward_routes_platform.csv"))
    assert code == 1 and "route" in err


def test_missing_file(capsys):
    code, _, err = run(capsys, "schedule", "--tasks", "no/such/tasks.csv", "--platform", fixture("two_es_platform.csv"))
    assert code == 1 and "no/such/tasks.csv" in err


def test_corrupt_priorities(capsys):
    code, _, err = run(capsys, "schedule", *five_task_args(), "--priorities", fixture("dup_priorities.txt"))
    assert code == 1 and "twice" in err


def test_mode_table_and_context(tmp_path, capsys):
    ctx = tmp_path / "c.csv"
    ctx.write_text("0,mode,energy\n")
    code, _, _ = run(capsys, "schedule", *five_task_args(), "--mode-table", fixture("modes.csv"), "--context", ctx,
                     "--out", tmp_path / "s.txt")
    assert code == 0
    # wcets doubled
    assert "1,1,0,20,0" in (tmp_path / "s.txt").read_text()


@pytest.fixture
def eight_task_prior(tmp_path, capsys):
    run(capsys, "schedule", *eight_task_args(), "--out", tmp_path / "f.txt", "--log-out", tmp_path / "f.log")
    return tmp_path / "f.txt", tmp_path / "f.log"


def test_recover_es3_failure(tmp_path, capsys, eight_task_prior):
    sched, log = eight_task_prior
    out = tmp_path / "r.txt"
    code, stdout, err = run(capsys, "recover", *eight_task_args(), "--schedule", sched, "--log", log,
                            "--context", fixture("es3_failure_context.csv"), "--out", out)
    assert code == 0
    assert "makespan: old=" in stdout and "failure recovery" in err
    rows = [l.split(",") for l in out.read_text().split("MESSAGES:")[0].splitlines()[2:]]
    assert not [r for r in rows if r[1] == "3" and int(r[2]) >= 9]
    prior_rows = [l for l in sched.read_text().split("MESSAGES:")[0].splitlines()[2:]]
    new_rows = out.read_text()
    for line in prior_rows:
        t, es, start, end, _ = line.split(",")
        if int(end) <= 9:
            assert f"{t},{es},{start},{end},1" in new_rows
    code, stdout, _ = run(capsys, "validate", *eight_task_args(), "--schedule", out, "--context", fixture("es3_failure_context.csv"))
    assert code == 0


def test_recover_needs_log_for_failure(capsys, eight_task_prior):
    sched, _ = eight_task_prior
    code, _, err = run(capsys, "recover", *eight_task_args(), "--schedule", sched, "--context", fixture("es3_failure_context.csv"))
    assert code == 1 and "--log" in err


def test_zero_slack_keeps_schedule(tmp_path, capsys, eight_task_prior):
    sched, log = eight_task_prior
    ctx = tmp_path / "c.csv"
    ctx.write_text("3,slack,1:3\n")
    out = tmp_path / "r.txt"
    code, _, _ = run(capsys, "recover", *eight_task_args(), "--schedule", sched, "--log", log, "--context", ctx, "--out", out)
    assert code == 0 and out.read_bytes() == sched.read_bytes()


def test_slack_and_mode_dispatch(tmp_path, capsys):
    run(capsys, "schedule", *five_task_args(), "--out", tmp_path / "s.txt", "--log-out", tmp_path / "s.log")
    code, stdout, err = run(capsys, "recover", *five_task_args(), "--schedule", tmp_path / "s.txt", "--log", tmp_path / "s.log",
                            "--context", fixture("slack_context.csv"), "--out", tmp_path / "r.txt")
    assert code == 0 and "temporal recovery" in err
    assert "new=70" in stdout
    ctx = tmp_path / "m.csv"
    ctx.write_text("20,mode,energy\n")
    code, _, err = run(capsys, "recover", *five_task_args(), "--schedule", tmp_path / "s.txt", "--context", ctx,
                       "--out", tmp_path / "m.txt")
    assert code == 0 and "full reconstruction" in err


def test_unknown_event_kind(tmp_path, capsys, eight_task_prior):
    sched, log = eight_task_prior
    ctx = tmp_path / "c.csv"
    ctx.write_text("3,meteor,ES1\n")
    code, _, err = run(capsys, "recover", *eight_task_args(), "--schedule", sched, "--log", log, "--context", ctx)
    assert code == 1 and "meteor" in err


def test_validate_catches_overlap(tmp_path, capsys, eight_task_prior):
    sched, _ = eight_task_prior
    code, stdout, _ = run(capsys, "validate", *eight_task_args(), "--schedule", sched)
    assert code == 0 and "safety check: OK" in stdout
    # stack task 2 on top of task 1 by moving it to task 1's ES
    text = sched.read_text()
    rows = text.split("MESSAGES:")[0].splitlines()[2:]
    es1 = rows[0].split(",")[1]
    t2 = rows[1].split(",")
    edited = text.replace(rows[1], ",".join([t2[0], es1, *t2[2:]]), 1)
    bad = tmp_path / "bad.txt"
    bad.write_text(edited)
    code, stdout, _ = run(capsys, "validate", *eight_task_args(), "--schedule", bad)
    assert code == 2 and "overlap" in stdout


def test_validate_failed_es(capsys, eight_task_prior):
    sched, _ = eight_task_prior
    code, stdout, _ = run(capsys, "validate", *eight_task_args(), "--schedule", sched, "--context", fixture("es3_failure_context.csv"))
    assert code == 2 and "failed_es" in stdout


def test_bench_small(capsys):
    code, stdout, _ = run(capsys, "bench", "--counts", "5,15", "--reps", "2", "--workers", "2", "--profile", "makespan")
    assert code == 0
    lines = stdout.splitlines()
    assert lines[0] == "task_count,profile,mean_runtime_s,log_bytes,recovery_s,workers,wall_s"
    assert len(lines) == 1 + 2 + 2


def test_bench_bad_config(capsys):
    code, _, err = run(capsys, "bench", "--reps", "0")
    assert code == 1 and "repetitions" in err
