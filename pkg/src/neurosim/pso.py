"""Minimal particle swarm core shared by the partitioning and placement
optimizers.

Particles live in a continuous box [0, 1]^d; problem-specific decoding
happens inside the fitness callback. The global best is tracked across all
iterations (including the initial swarm), so the returned cost is monotone
non-increasing in the iteration count.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Sequence

import numpy as np


@dataclass
class PsoParams:
    swarm_size: int = 20
    iterations: int = 100
    w: float = 0.729  # inertia
    c1: float = 1.494  # cognitive
    c2: float = 1.494  # social

    def check(self) -> None:
        if self.swarm_size < 1 or self.iterations < 0:
            raise ValueError("swarm_size must be >= 1 and iterations >= 0")


def run_pso(
    n_dims: int,
    evaluate: Callable[[np.ndarray], tuple[float, Any]],
    params: PsoParams,
    seed: int = 0,
    seeded_positions: Sequence[np.ndarray] = (),
) -> tuple[float, Any, list[float]]:
    """Run the swarm and return (best cost, best payload, per-iteration best).

    ``evaluate`` maps a position to (cost, payload); infeasible decodes may
    return ``math.inf``. ``seeded_positions`` overwrite the first particles,
    letting callers plant known-good starting points (e.g. an identity
    assignment) so the result can never be worse than them.
    """
    params.check()
    rng = np.random.default_rng(seed)
    swarm = params.swarm_size

    pos = rng.random((swarm, n_dims))
    for k, seeded in enumerate(seeded_positions):
        if k >= swarm:
            break
        pos[k] = np.asarray(seeded, dtype=float)
    vel = np.zeros((swarm, n_dims))

    pbest_pos = pos.copy()
    pbest_cost = np.empty(swarm)
    gbest_cost = np.inf
    gbest_payload: Any = None
    gbest_pos = pos[0].copy()
    for k in range(swarm):
        cost, payload = evaluate(pos[k])
        pbest_cost[k] = cost
        if cost < gbest_cost:
            gbest_cost, gbest_payload, gbest_pos = cost, payload, pos[k].copy()

    history = [gbest_cost]
    for _ in range(params.iterations):
        r1 = rng.random((swarm, n_dims))
        r2 = rng.random((swarm, n_dims))
        vel = params.w * vel + params.c1 * r1 * (pbest_pos - pos) + params.c2 * r2 * (gbest_pos - pos)
        pos = np.clip(pos + vel, 0.0, 1.0)
        for k in range(swarm):
            cost, payload = evaluate(pos[k])
            if cost < pbest_cost[k]:
                pbest_cost[k] = cost
                pbest_pos[k] = pos[k].copy()
            if cost < gbest_cost:
                gbest_cost, gbest_payload, gbest_pos = cost, payload, pos[k].copy()
        history.append(gbest_cost)

    return gbest_cost, gbest_payload, history
