"""Coordinate charts evaluated by the finite-difference oracle.

An ambient chart maps parameters to an AmbientVector; a bundle chart maps them
to a pair (x, e) on T M over a 2-dimensional base.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Callable, List, Optional, Sequence, Tuple

import numpy as np

from cgmlab.core.bundle import BundlePoint
from cgmlab.core.model_spaces import (
    AmbientVector,
    ModelSpace,
    Signature,
    frame_fields,
    hopf_coordinates,
    retract,
    sphere3,
    stereographic_frame,
    stereographic_inverse,
)
from cgmlab.errors import DomainError, InvalidInputError
from cgmlab.schemas import ChartKind, SpaceKind

Box = Tuple[Tuple[float, float], ...]


@dataclass(frozen=True, eq=False)
class Chart:
    name: str
    dim: int
    embed: Callable[[np.ndarray], Any]
    domain_box: Box
    kind: ChartKind = ChartKind.ambient
    space: Optional[ModelSpace] = None
    # analytic coordinate vectors of an ambient chart, when known
    tangents: Optional[Callable[[np.ndarray], List[AmbientVector]]] = None

    def __post_init__(self) -> None:
        if self.dim not in (2, 3, 4):
            raise InvalidInputError(f"chart dimension must be 2, 3 or 4, got {self.dim}")
        if len(self.domain_box) != self.dim:
            raise InvalidInputError(f"domain box has {len(self.domain_box)} intervals for dim {self.dim}")
        for lo, hi in self.domain_box:
            if not lo < hi:
                raise InvalidInputError(f"empty interval ({lo}, {hi}) in domain box")
        if self.kind == ChartKind.bundle and self.space is None:
            raise InvalidInputError("bundle charts need their base space")

    def margin(self, u: Sequence[float]) -> float:
        """Distance from u to the nearest face of the box (negative outside)."""
        u = np.asarray(u, dtype=float)
        return float(min(min(ui - lo, hi - ui) for ui, (lo, hi) in zip(u, self.domain_box)))

    def require_interior(self, u: Sequence[float], margin: float) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        if u.shape != (self.dim,):
            raise InvalidInputError(f"{self.name} expects {self.dim} parameters, got shape {u.shape}")
        if self.margin(u) < margin:
            raise DomainError(f"{u} is within {margin:g} of the {self.name} chart boundary")
        return u

    def center(self) -> np.ndarray:
        return np.array([(lo + hi) / 2.0 for lo, hi in self.domain_box])

    def sample(self, rng: np.random.Generator, shrink: float = 0.8) -> np.ndarray:
        """Uniform point of the box shrunk about its center by the given factor."""
        mid = self.center()
        half = np.array([(hi - lo) / 2.0 for lo, hi in self.domain_box]) * shrink
        return mid + rng.uniform(-1.0, 1.0, size=self.dim) * half

    def point(self, u: Sequence[float]) -> Any:
        return self.embed(np.asarray(u, dtype=float))

    def bundle_point(self, u: Sequence[float]) -> BundlePoint:
        if self.kind != ChartKind.bundle:
            raise InvalidInputError(f"{self.name} is not a bundle chart")
        x, e = self.point(u)
        return BundlePoint(self.space, x, e)


# -------- Ambient charts --------

def euclidean_chart(dim: int = 2) -> Chart:
    """Cartesian coordinates of a flat plane (or 3-space) sitting in R^{dim+1}."""
    signature = Signature(dim + 1, 0)

    def embed(u: np.ndarray) -> AmbientVector:
        return AmbientVector(np.append(u, 0.0), signature)

    def tangents(u: np.ndarray) -> List[AmbientVector]:
        return [AmbientVector(row, signature) for row in np.eye(dim + 1)[:dim]]

    return Chart("euclidean", dim, embed, tuple((-1.0, 1.0) for _ in range(dim)), tangents=tangents)


def polar_chart() -> Chart:
    """Polar coordinates (rho, theta) of the flat plane."""
    signature = Signature(3, 0)

    def embed(u: np.ndarray) -> AmbientVector:
        rho, theta = u
        return AmbientVector((rho * math.cos(theta), rho * math.sin(theta), 0.0), signature)

    def tangents(u: np.ndarray) -> List[AmbientVector]:
        rho, theta = u
        ct, st = math.cos(theta), math.sin(theta)
        return [AmbientVector((ct, st, 0.0), signature), AmbientVector((-rho * st, rho * ct, 0.0), signature)]

    return Chart("polar", 2, embed, ((0.5, 2.0), (-3.0, 3.0)), tangents=tangents)


def _stereo_box(space: ModelSpace) -> Box:
    half = 2.0 if space.is_sphere else 0.6
    return ((-half, half), (-half, half))


def stereographic_chart(space: ModelSpace) -> Chart:
    if space.kind not in (SpaceKind.sphere2, SpaceKind.hyperbolic_plane):
        raise InvalidInputError(f"stereographic chart needs Sphere2 or HyperbolicPlane, got {space.kind.value}")

    def embed(u: np.ndarray) -> AmbientVector:
        return stereographic_inverse(space, complex(u[0], u[1]))

    def tangents(u: np.ndarray) -> List[AmbientVector]:
        # the chart is conformal with factor 2 / (sqrt(c) (1 + kappa |u|^2))
        s = 1.0 + space.kappa * float(np.dot(u, u))
        scale = 2.0 / (math.sqrt(space.c) * s)
        E1, E2 = stereographic_frame(space, complex(u[0], u[1]))
        return [E1 * scale, E2 * scale]

    return Chart(
        f"stereographic-{space.kind.value}", 2, embed, _stereo_box(space), space=space, tangents=tangents
    )


def hopf_chart(space: Optional[ModelSpace] = None) -> Chart:
    """(eta, xi1, xi2) on S^3, away from the circles eta = 0 and eta = pi/2."""
    space = space or sphere3(1.0)
    radius = 1.0 / math.sqrt(space.c)

    def embed(u: np.ndarray) -> AmbientVector:
        return hopf_coordinates(space, u[0], u[1], u[2])

    def tangents(u: np.ndarray) -> List[AmbientVector]:
        eta, xi1, xi2 = u
        ce, se = math.cos(eta), math.sin(eta)
        d_eta = (-se * math.cos(xi1), -se * math.sin(xi1), ce * math.cos(xi2), ce * math.sin(xi2))
        d_xi1 = (-ce * math.sin(xi1), ce * math.cos(xi1), 0.0, 0.0)
        d_xi2 = (0.0, 0.0, -se * math.sin(xi2), se * math.cos(xi2))
        return [space.vector(np.array(d) * radius) for d in (d_eta, d_xi1, d_xi2)]

    box = ((0.2, 1.37), (-3.0, 3.0), (-3.0, 3.0))
    return Chart("hopf", 3, embed, box, space=space, tangents=tangents)


def frame_adapted_chart(space: ModelSpace, p0: AmbientVector, half_width: float = 0.5) -> Chart:
    """u -> retract(p0 + sum u_i X_i(p0)); coordinate vectors at u = 0 are X1, X2, X3."""
    frame = frame_fields(space, p0).frame

    def embed(u: np.ndarray) -> AmbientVector:
        shifted = p0
        for ui, Xi in zip(u, frame):
            shifted = shifted + Xi * ui
        return retract(space, shifted)

    half = half_width / math.sqrt(space.c)
    box = tuple((-half, half) for _ in range(3))
    return Chart(f"frame-{space.kind.value}", 3, embed, box, space=space)


# -------- Bundle charts --------

def unit_bundle_chart(base: ModelSpace) -> Chart:
    """(u1, u2, theta) -> (x(u), cos(theta) E1 + sin(theta) E2)."""

    def embed(u: np.ndarray) -> Tuple[AmbientVector, AmbientVector]:
        zeta = complex(u[0], u[1])
        E1, E2 = stereographic_frame(base, zeta)
        return stereographic_inverse(base, zeta), E1 * math.cos(u[2]) + E2 * math.sin(u[2])

    box = _stereo_box(base) + ((-3.0, 3.0),)
    return Chart(f"unit-bundle-{base.kind.value}", 3, embed, box, ChartKind.bundle, base)


def tangent_bundle_chart(base: ModelSpace) -> Chart:
    """(u1, u2, v1, v2) -> (x(u), v1 E1 + v2 E2)."""

    def embed(u: np.ndarray) -> Tuple[AmbientVector, AmbientVector]:
        zeta = complex(u[0], u[1])
        E1, E2 = stereographic_frame(base, zeta)
        return stereographic_inverse(base, zeta), E1 * u[2] + E2 * u[3]

    box = _stereo_box(base) + ((-2.0, 2.0), (-2.0, 2.0))
    return Chart(f"tangent-bundle-{base.kind.value}", 4, embed, box, ChartKind.bundle, base)


def mapped_chart(chart: Chart, mapping: Callable[[Any], Any], target: ModelSpace, kind: ChartKind) -> Chart:
    """chart followed by mapping; a BundlePoint result is flattened to (x, e)."""

    def embed(u: np.ndarray) -> Any:
        out = mapping(chart.embed(u))
        if isinstance(out, BundlePoint):
            return out.x, out.e
        return out

    return Chart(f"{chart.name}->mapped", chart.dim, embed, chart.domain_box, kind, target)
