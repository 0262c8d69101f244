import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import fixture
from oracles import longest_path_blevels
from reconsched.errors import DuplicateTaskError, EmptyPlatformError, MissingTaskError, UnknownTaskError, UnknownEndSystemError
from reconsched.models import Task, build_application, load_application, load_platform
from reconsched.priorities import (
    LEAST_LOADED,
    b_level,
    builtin_temporal,
    ingest_priorities,
    least_loaded,
    serialize_priorities,
    temporal_order,
)
from reconsched.workload import random_dag


def _oracle(am):
    return longest_path_blevels({t.id: (t.wcet, list(t.children)) for t in am.tasks})


def test_five_task_blevels():
    am = load_application(fixture("five_tasks.csv"))
    assert b_level(am) == {4: 25, 5: 30, 2: 40, 3: 50, 1: 60}
    assert temporal_order(b_level(am)).order == (1, 3, 2, 5, 4)


def test_small_cases():
    one = build_application([Task(1, (), (), 7, 0)])
    assert b_level(one) == {1: 7}
    chain = build_application([Task(1, (), (2,), 2, 1), Task(2, (1,), (), 3, 0)])
    assert b_level(chain) == {2: 3, 1: 5}


def test_temporal_order_ties_and_empty():
    assert temporal_order({3: 5, 1: 5, 2: 5}).order == (1, 2, 3)
    assert temporal_order({}).order == ()


def test_least_loaded():
    assert least_loaded({1: 10, 2: 4, 3: 7}) == 2
    assert least_loaded({1: 5, 2: 5}) == 1
    with pytest.raises(EmptyPlatformError):
        least_loaded({})


def dags(max_tasks=12):
    return st.builds(
        lambda n, seed: random_dag(n, random.Random(seed)),
        st.integers(1, max_tasks),
        st.integers(0, 2**32),
    )


@settings(max_examples=150, deadline=None)
@given(dags())
def test_blevel_matches_exhaustive_paths(am):
    assert b_level(am) == _oracle(am)


@settings(max_examples=100, deadline=None)
@given(dags(), st.data())
def test_blevel_monotone_in_wcet(am, data):
    tid = data.draw(st.sampled_from(am.task_ids))
    bump = data.draw(st.integers(1, 20))
    tasks = [t if t.id != tid else Task(t.id, t.parents, t.children, t.wcet + bump, t.message_size) for t in am.tasks]
    before, after = b_level(am), b_level(build_application(tasks))
    assert all(after[v] >= before[v] for v in before)


@settings(max_examples=60, deadline=None)
@given(st.dictionaries(st.integers(1, 50), st.integers(0, 100)))
def test_temporal_order_sorted_and_deterministic(bl):
    tp = temporal_order(bl)
    assert tp == temporal_order(dict(reversed(list(bl.items()))))
    keys = [(-bl[t], t) for t in tp.order]
    assert keys == sorted(keys)


def test_ingest_identity_path():
    am = load_application(fixture("five_tasks.csv"))
    tp, sp = ingest_priorities(fixture("five_priorities.txt"), am)
    assert tp.order == builtin_temporal(am).order == (1, 3, 2, 5, 4)
    assert sp.target(1) == LEAST_LOADED


def test_ingest_errors():
    am = load_application(fixture("five_tasks.csv"))
    with pytest.raises(UnknownTaskError):
        ingest_priorities("TEMPORAL:\n1\n2\n3\n4\n5\n9\n", am)
    with pytest.raises(MissingTaskError):
        ingest_priorities("TEMPORAL:\n1\n2\n", am)
    with pytest.raises(DuplicateTaskError):
        ingest_priorities(fixture("dup_priorities.txt"), am)
    pm = load_platform(fixture("two_es_platform.csv"))
    with pytest.raises(UnknownEndSystemError):
        ingest_priorities("SPATIAL:\n1,7\n", am, pm)


def test_spatial_only_uses_builtin_order():
    am = load_application(fixture("five_tasks.csv"))
    tp, sp = ingest_priorities("SPATIAL:\n1,ES2\n4,1\n", am)
    assert tp.order == (1, 3, 2, 5, 4)
    assert sp.target(1) == 2 and sp.target(4) == 1 and sp.target(2) == LEAST_LOADED


def test_priorities_roundtrip():
    am = load_application(fixture("five_tasks.csv"))
    tp, sp = ingest_priorities("TEMPORAL:\n3\n1\n2\n5\n4\nSPATIAL:\n2,2\n", am)
    again = ingest_priorities(serialize_priorities(tp, sp), am)
    assert again[0].order == tp.order and again[1] == sp
