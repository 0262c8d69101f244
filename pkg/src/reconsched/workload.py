"""Seeded random layered DAGs and chained-router platforms."""

from __future__ import annotations

import math
import random

from .errors import ConfigError
from .models import (
    ApplicationModel,
    EndSystem,
    PlatformModel,
    Task,
    build_application,
)

EDGE_PROBABILITY = 0.3
WCET_RANGE = (5, 30)
MESSAGE_RANGE = (1, 8)


def chained_platform(n_es: int = 6, per_router: int = 2, bandwidth: float = 1) -> PlatformModel:
    """ES attached ``per_router`` at a time to routers R1 - R2 - ... in a chain.

    With the defaults this is the six-ES, three-router topology whose routes
    include (1,5) -> R1,R2,R3 and (5,6) -> R3.
    """
    if n_es < 1:
        raise ConfigError("need at least one end system")
    n_routers = math.ceil(n_es / per_router)
    routers = tuple(f"R{i}" for i in range(1, n_routers + 1))
    home = {es: (es - 1) // per_router for es in range(1, n_es + 1)}
    routes = {}
    for a in home:
        for b in home:
            if a == b:
                continue
            i, j = home[a], home[b]
            step = 1 if j >= i else -1
            routes[(a, b)] = tuple(routers[k] for k in range(i, j + step, step))
    ends = {es: EndSystem(es) for es in home}
    return PlatformModel(ends, routers, routes, bandwidth)


def random_dag(n: int, rng: random.Random) -> ApplicationModel:
    if n < 1:
        raise ConfigError(f"task count must be >= 1, got {n}")
    n_layers = max(1, round(math.sqrt(n)))
    # every layer gets one task, the rest are spread at random
    sizes = [1] * n_layers
    for _ in range(n - n_layers):
        sizes[rng.randrange(n_layers)] += 1
    layers, next_id = [], 1
    for size in sizes:
        layers.append(list(range(next_id, next_id + size)))
        next_id += size
    parents = {t: [] for t in range(1, n + 1)}
    children = {t: [] for t in range(1, n + 1)}
    for upper, lower in zip(layers, layers[1:]):
        for u in upper:
            for v in lower:
                if rng.random() < EDGE_PROBABILITY:
                    children[u].append(v)
                    parents[v].append(u)
    tasks = [
        Task(
            t,
            tuple(parents[t]),
            tuple(children[t]),
            rng.randint(*WCET_RANGE),
            rng.randint(*MESSAGE_RANGE),
        )
        for t in range(1, n + 1)
    ]
    return build_application(tasks)


def generate_workload(n: int, seed: int, n_es: int = 6) -> tuple[ApplicationModel, PlatformModel]:
    """Deterministic (model, platform) pair for ``n`` tasks and ``seed``."""
    if n < 1:
        raise ConfigError(f"task count must be >= 1, got {n}")
    rng = random.Random(seed)
    return random_dag(n, rng), chained_platform(n_es)
