"""Seeded sampling of points, tangent vectors and bundle points.

All randomness flows through numpy's PCG64; each check draws from its own
child stream of SeedSequence.spawn.
"""

from __future__ import annotations

import math
from typing import List

import numpy as np

from cgmlab.core.bundle import BundlePoint
from cgmlab.core.charts import Chart
from cgmlab.core.lie_bridge import GroupElement, psi
from cgmlab.core.model_spaces import (
    AmbientVector,
    ModelSpace,
    ambient_dot,
    anti_de_sitter3,
    sphere3,
    tangent_project,
)
from cgmlab.errors import InvalidInputError
from cgmlab.schemas import ChartKind, GroupKind, SpaceKind


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def spawn_rngs(seed: int, count: int) -> List[np.random.Generator]:
    children = np.random.SeedSequence(seed).spawn(count)
    return [np.random.Generator(np.random.PCG64(child)) for child in children]


def sample_point(space: ModelSpace, rng: np.random.Generator) -> AmbientVector:
    r = 1.0 / math.sqrt(space.c)
    if space.is_sphere:
        g = rng.standard_normal(space.signature.dim)
        return space.vector(g / np.linalg.norm(g) * r)
    if space.kind == SpaceKind.hyperbolic_plane:
        x1, x2 = rng.standard_normal(2)
        return space.vector(np.array([x1, x2, math.sqrt(1.0 + x1 * x1 + x2 * x2)]) * r)
    # anti de Sitter: solve x3^2 + x4^2 = 1 + x1^2 + x2^2 for a random angle
    x1, x2 = rng.standard_normal(2)
    angle = rng.uniform(-math.pi, math.pi)
    rho = math.sqrt(1.0 + x1 * x1 + x2 * x2)
    return space.vector(np.array([x1, x2, rho * math.cos(angle), rho * math.sin(angle)]) * r)


def sample_points(space: ModelSpace, rng: np.random.Generator, n: int) -> np.ndarray:
    """n rows drawn like sample_point, as one (n, dim+1) array."""
    if n < 1:
        raise InvalidInputError(f"need at least one sample, got {n}")
    r = 1.0 / math.sqrt(space.c)
    if space.is_sphere:
        g = rng.standard_normal((n, space.signature.dim))
        return g / np.linalg.norm(g, axis=1, keepdims=True) * r
    x = rng.standard_normal((n, 2))
    rho = np.sqrt(1.0 + np.sum(x * x, axis=1))
    if space.kind == SpaceKind.hyperbolic_plane:
        return np.column_stack([x, rho]) * r
    angle = rng.uniform(-math.pi, math.pi, size=n)
    return np.column_stack([x, rho * np.cos(angle), rho * np.sin(angle)]) * r


def sample_tangent(space: ModelSpace, x: AmbientVector, rng: np.random.Generator) -> AmbientVector:
    return tangent_project(space, x, space.vector(rng.standard_normal(space.signature.dim)))


def sample_unit_tangent(space: ModelSpace, x: AmbientVector, rng: np.random.Generator) -> AmbientVector:
    """Spacelike unit tangent; on 2-dimensional bases every tangent is spacelike."""
    for _ in range(100):
        v = sample_tangent(space, x, rng)
        q = ambient_dot(v, v)
        if q > 1e-6:
            return v / math.sqrt(q)
    raise InvalidInputError(f"no spacelike tangent found at {x!r}")


def sample_bundle_point(base: ModelSpace, rng: np.random.Generator, unit: bool = True) -> BundlePoint:
    x = sample_point(base, rng)
    if unit:
        return BundlePoint(base, x, sample_unit_tangent(base, x, rng), unit=True)
    return BundlePoint(base, x, sample_tangent(base, x, rng))


def sample_group_element(kind: GroupKind, rng: np.random.Generator) -> GroupElement:
    unit = sphere3(1.0) if GroupKind(kind) == GroupKind.su2 else anti_de_sitter3(1.0)
    return psi(sample_point(unit, rng))


def sample_unit_fibre_parameters(chart: Chart, rng: np.random.Generator) -> np.ndarray:
    """(u1, u2, cos theta, sin theta) on a 4-dim tangent bundle chart: a unit fibre point."""
    if chart.kind != ChartKind.bundle or chart.dim != 4:
        raise InvalidInputError(f"{chart.name} is not a 4-dim tangent bundle chart")
    u1, u2 = chart.sample(rng)[:2]
    theta = rng.uniform(-math.pi, math.pi)
    return np.array([u1, u2, math.cos(theta), math.sin(theta)])
