"""Seeded instance generators shared by the module tests and the acceptance suite."""
from __future__ import annotations

import numpy as np

from czkit import generators as gen
from czkit.space import ball_members


def seeded_space(seed: int, n_max: int = 500):
    """One space per seed, cycling through the generator kinds."""
    rng = np.random.default_rng([seed, 17])
    kind = seed % 6
    weights = "random" if rng.random() < 0.5 else "unit"
    if kind == 0:
        return gen.line(int(rng.integers(2, min(n_max, 300) + 1)), weights=weights, seed=seed)
    if kind == 1:
        return gen.grid(int(rng.integers(1, 21)), int(rng.integers(2, 21)), weights=weights, seed=seed)
    if kind == 2:
        return gen.ultrametric_dyadic(int(rng.integers(1, 9)), weights=weights, seed=seed)
    if kind == 3:
        base = gen.line(int(rng.integers(2, 120))) if rng.random() < 0.5 else gen.grid(
            int(rng.integers(2, 10)), int(rng.integers(2, 10)))
        return gen.snowflake(base, float(rng.uniform(0.3, 0.9)))
    if kind == 4:
        n = int(rng.integers(2, min(n_max, 300) + 1))
        lattice = 0.05 if rng.random() < 0.3 else None
        return gen.random_points(n, dim=int(rng.integers(1, 4)), seed=seed, lattice=lattice, weights=weights)
    n = int(rng.integers(3, 120))
    edges = [[i, i + 1, float(rng.integers(1, 4))] for i in range(n - 1)]
    edges += [[int(a), int(b), float(rng.integers(1, 9))] for a, b in rng.integers(0, n, size=(n // 3, 2)) if a != b]
    return gen.graph_space(n, edges, weights=weights, seed=seed)


def czd_instance(seed: int):
    """An admissible decomposition input: ``(space, f, E, R, kappa, alpha)``.

    The spaces have small doubling constants and ``E`` holds many points, so
    sparse spikes in ``f`` usually push the maximal function over ``alpha``.
    """
    rng = np.random.default_rng([seed, 29])
    kind = seed % 4
    # random weights inflate D, which makes nonempty bad sets rare
    weights = "random" if rng.random() < 0.2 else "unit"
    if kind == 0:
        space = gen.line(int(rng.integers(150, 400)), weights=weights, seed=seed)
    elif kind == 1:
        space = gen.ultrametric_dyadic(int(rng.integers(5, 9)), weights=weights, seed=seed)
    elif kind == 2:
        space = gen.grid(int(rng.integers(8, 16)), int(rng.integers(8, 16)), weights=weights, seed=seed)
    else:
        space = gen.snowflake(gen.line(int(rng.integers(60, 200))), float(rng.uniform(0.6, 0.95)))
    x0 = int(rng.integers(space.n))
    R = float(rng.uniform(0.5, 1.5) * space.diameter)
    E = ball_members(space, x0, R / 2)
    f = np.zeros((space.n, int(rng.integers(1, 3))))
    f[E] = 0.01 * rng.standard_normal((E.size, f.shape[1]))
    spikes = rng.choice(E, size=min(E.size, int(rng.integers(1, 4))), replace=False)
    f[spikes] += rng.uniform(1.0, 20.0, size=(spikes.size, f.shape[1]))
    f[spikes[0]] *= 25.0
    kappa = float(rng.uniform(2.0 + 1e-6, 3.0))
    return space, f, E, R, kappa, float(rng.uniform(1.0 + 1e-9, 1.1))
