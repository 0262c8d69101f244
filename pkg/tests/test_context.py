import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import fixture
from reconsched.context import (
    ContextEvent,
    ModeTable,
    apply_events,
    apply_failure,
    apply_mode,
    apply_slack,
    load_context,
    load_mode_table,
    serialize_context,
)
from reconsched.errors import (
    AlreadyFailedError,
    ContextError,
    DeadEndpointError,
    OverrunError,
    UnknownEndSystemError,
    UnknownModeError,
    UnknownTaskError,
)
from reconsched.models import load_application, route_lookup
from reconsched.priorities import least_loaded
from reconsched.workload import chained_platform


@pytest.fixture
def am():
    return load_application(fixture("five_tasks.csv"))


@pytest.fixture
def pm():
    return chained_platform()


def test_slack_sets_actual(am):
    out = apply_slack(am, ContextEvent.slack(6, 1, 6))
    assert out.actual_execution == {1: 6}
    assert out.by_id[1].wcet == 10
    assert out.duration(1) == 6
    assert am.actual_execution == {}


def test_zero_slack_is_identity(am):
    assert apply_slack(am, ContextEvent.slack(10, 1, 10)) == am


def test_slack_errors(am):
    with pytest.raises(OverrunError):
        apply_slack(am, ContextEvent.slack(0, 1, 12))
    with pytest.raises(UnknownTaskError):
        apply_slack(am, ContextEvent.slack(0, 9, 1))


def test_failure_marks_es(pm):
    out = apply_failure(pm, ContextEvent.failure(9, 3))
    assert out.live_end_systems == [1, 2, 4, 5, 6]
    gone = {(1, 3), (2, 3), (3, 5)}
    assert not gone & set(out.available_routes())
    assert out.routers == pm.routers
    for a, b in gone:
        with pytest.raises(DeadEndpointError):
            route_lookup(out, a, b)
    assert least_loaded({es: 0 for es in out.live_end_systems}) != 3


def test_failure_errors(pm):
    with pytest.raises(UnknownEndSystemError):
        apply_failure(pm, ContextEvent.failure(0, 99))
    once = apply_failure(pm, ContextEvent.failure(9, 3))
    with pytest.raises(AlreadyFailedError):
        apply_failure(once, ContextEvent.failure(10, 3))


def test_mode_performance_identity(am, pm):
    assert apply_mode(am, pm, ContextEvent.mode_change(0, "performance")) == (am, pm, "makespan")


def test_mode_energy_doubles_wcets(am, pm):
    mt = load_mode_table(fixture("modes.csv"))
    am2, pm2, profile = apply_mode(am, pm, ContextEvent.mode_change(0, "energy"), mt)
    assert [t.wcet for t in am2.tasks] == [20, 30, 40, 50, 60]
    assert pm2.end_systems[1].active_power == 0.5
    assert profile == "energy"


def test_mode_rounds_up(am, pm):
    am2, _, _ = apply_mode(am, pm, ContextEvent.mode_change(0, "energy"), ModeTable.default())
    assert [t.wcet for t in am2.tasks] == [15, 23, 30, 38, 45]


def test_unknown_mode(pm):
    with pytest.raises(ContextError):
        ContextEvent.mode_change(0, "turbo")
    with pytest.raises(UnknownModeError):
        ModeTable({})["energy"]


def test_simultaneous_events_order(am, pm):
    events = [ContextEvent.slack(5, 1, 6), ContextEvent.failure(5, 3)]
    expected = (apply_slack(am, events[0]), apply_failure(pm, events[1]), "makespan")
    assert apply_events(am, pm, events) == expected


def test_empty_and_double_failure(am, pm):
    assert apply_events(am, pm, [], profile="energy") == (am, pm, "energy")
    with pytest.raises(AlreadyFailedError):
        apply_events(am, pm, [ContextEvent.failure(1, 3), ContextEvent.failure(1, 3)])


def test_context_file_format():
    events = load_context("9,failure,ES3\n4,slack,1:6\n12,mode,energy\n")
    assert events == [
        ContextEvent.failure(9, 3),
        ContextEvent.slack(4, 1, 6),
        ContextEvent.mode_change(12, "energy"),
    ]
    assert load_context(serialize_context(events)) == events
    with pytest.raises(ContextError):
        load_context("3,meteor,ES1\n")


events = st.one_of(
    st.builds(ContextEvent.slack, st.integers(0, 50), st.integers(1, 5), st.integers(0, 10)),
    st.builds(ContextEvent.failure, st.integers(0, 50), st.integers(1, 6)),
    st.builds(ContextEvent.mode_change, st.integers(0, 50), st.sampled_from(["performance", "workload_balance", "energy"])),
)


@settings(max_examples=100, deadline=None)
@given(st.lists(events, max_size=5))
def test_apply_events_pure_and_order_free(evs):
    am = load_application(fixture("five_tasks.csv"))
    pm = chained_platform()

    def run(xs):
        try:
            return apply_events(am, pm, xs)
        except ContextError as exc:
            return type(exc)

    first = run(evs)
    assert run(list(reversed(evs))) == first
    assert run(evs) == first
    assert am == load_application(fixture("five_tasks.csv"))
    assert pm == chained_platform()


@settings(max_examples=50, deadline=None)
@given(events)
def test_singleton_equals_operator(e):
    am = load_application(fixture("five_tasks.csv"))
    pm = chained_platform()
    try:
        got = apply_events(am, pm, [e])
    except ContextError:
        return
    if e.kind == "slack":
        assert got == (apply_slack(am, e), pm, "makespan")
    elif e.kind == "failure":
        assert got == (am, apply_failure(pm, e), "makespan")
    else:
        assert got == apply_mode(am, pm, e)
