import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reconsched.errors import ConfigError
from reconsched.models import load_application, route_lookup, serialize_application, serialize_platform
from reconsched.workload import chained_platform, generate_workload


def test_seeded_determinism():
    a = generate_workload(5, 42)
    b = generate_workload(5, 42)
    assert serialize_application(a[0]) == serialize_application(b[0])
    assert serialize_platform(a[1]) == serialize_platform(b[1])


def test_zero_tasks():
    with pytest.raises(ConfigError):
        generate_workload(0, 1)


def test_thirty_tasks_pass_validation():
    am, pm = generate_workload(30, 7)
    assert len(am.tasks) == 30
    assert load_application(serialize_application(am)) == am
    assert sorted(pm.end_systems) == [1, 2, 3, 4, 5, 6]
    assert pm.routers == ("R1", "R2", "R3")


def test_chained_platform_routes():
    pm = chained_platform()
    expected = {
        (1, 3): ("R1", "R2"), (1, 4): ("R1", "R2"), (1, 5): ("R1", "R2", "R3"),
        (2, 3): ("R1", "R2"), (2, 6): ("R1", "R2", "R3"), (3, 5): ("R2", "R3"),
        (4, 6): ("R2", "R3"), (5, 6): ("R3",),
    }
    for pair, routers in expected.items():
        assert pm.routes[pair] == routers


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 120), st.integers(0, 2**31))
def test_generated_shape(n, seed):
    am, pm = generate_workload(n, seed)
    assert len(am.tasks) == n
    for t in am.tasks:
        assert 5 <= t.wcet <= 30
        assert 1 <= t.message_size <= 8
    assert len(route_lookup(pm, 1, 6)) == 4
    for p, c in am.edges():
        assert am.message(p, c).size == am.by_id[p].message_size
