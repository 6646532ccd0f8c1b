"""Tensor-product structured grids with exterior complex scaling (ECS) layers.

An axis is described by its interval widths. The physical interior consists of
``interior_points`` equal real intervals of width ``h = interior_length /
interior_points``; an ECS layer appends (or prepends) intervals of width
``h * exp(1j * angle)``. Both extreme nodes of every axis carry a homogeneous
Dirichlet condition, so an axis with ``N`` intervals holds ``N - 1`` unknowns.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

__all__ = [
    "ConfigurationError",
    "CoarsestLevelReached",
    "EcsLayer",
    "AxisSpec",
    "Axis",
    "Grid",
    "build_grid",
    "coarsen_grid",
    "DEFAULT_ECS_ANGLE",
]

DEFAULT_ECS_ANGLE = np.pi / 6

# Per-interval segment labels.
INTERIOR = 0
ECS_LOW = 1
ECS_HIGH = 2
MIXED = 3


class ConfigurationError(ValueError):
    """Invalid problem or solver configuration."""


class CoarsestLevelReached(ValueError):
    """Raised when a grid cannot be coarsened any further."""


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class EcsLayer:
    points: int
    angle: float = DEFAULT_ECS_ANGLE

    def __post_init__(self):
        if int(self.points) != self.points or self.points < 1:
            raise ConfigurationError(f"ECS layer needs >= 1 points, got {self.points}")
        if not 0.0 < self.angle < np.pi / 2:
            raise ConfigurationError(
                f"ECS angle must lie in (0, pi/2), got {self.angle}")


@dataclass(frozen=True)
class AxisSpec:
    """Description of one grid axis.

    ``ecs_low`` / ``ecs_high`` may be given explicitly, or set to ``"auto"`` to
    request a layer of ``interior_points // 4`` points at the default angle.
    """

    interior_points: int
    interior_length: float = 1.0
    ecs_low: Optional[EcsLayer] = None
    ecs_high: Optional[EcsLayer] = None
    require_quarter_layers: bool = False

    @staticmethod
    def with_ecs(n: int, length: float = 1.0, low: bool = True, high: bool = True,
                 angle: float = DEFAULT_ECS_ANGLE) -> "AxisSpec":
        """Axis with ECS layers of ``n/4`` points on the requested sides."""
        if n % 4:
            raise ConfigurationError(f"ECS layer of n/4 points needs n divisible by 4, got n={n}")
        layer = EcsLayer(n // 4, angle)
        return AxisSpec(n, length, layer if low else None, layer if high else None,
                        require_quarter_layers=True)

    def validate(self) -> None:
        n = self.interior_points
        if int(n) != n or not _is_power_of_two(int(n)) or n < 2:
            raise ConfigurationError(f"interior_points must be a power of two >= 2, got {n}")
        if not self.interior_length > 0:
            raise ConfigurationError(f"interior_length must be positive, got {self.interior_length}")
        if self.require_quarter_layers:
            for layer in (self.ecs_low, self.ecs_high):
                if layer is not None and layer.points * 4 != n:
                    raise ConfigurationError(
                        f"ECS layer must have n/4 = {n / 4:g} points, got {layer.points}")


@dataclass(frozen=True, eq=False)
class Axis:
    """One axis of a grid: interval widths plus segment labels."""

    spacings: np.ndarray          # complex, one entry per interval
    labels: np.ndarray            # int, segment label per interval
    origin: complex = 0.0
    ecs_low: Optional[EcsLayer] = None
    ecs_high: Optional[EcsLayer] = None
    h: float = 1.0                # interior spacing on this level

    @property
    def intervals(self) -> int:
        return len(self.spacings)

    @property
    def unknowns(self) -> int:
        return len(self.spacings) - 1

    @property
    def interior_points(self) -> int:
        return int(np.count_nonzero(self.labels == INTERIOR))

    @property
    def nodes(self) -> np.ndarray:
        """Complex node coordinates, extreme (Dirichlet) nodes included."""
        return self.origin + np.concatenate([[0.0], np.cumsum(self.spacings)])

    @property
    def unknown_nodes(self) -> np.ndarray:
        return self.nodes[1:-1]

    @property
    def is_uniform_real(self) -> bool:
        return bool(np.all(self.labels == INTERIOR))

    def coarsen(self) -> "Axis":
        n = len(self.spacings)
        if n % 2 or n < 4:
            raise CoarsestLevelReached(f"axis with {n} intervals cannot be coarsened")
        s = self.spacings[0::2] + self.spacings[1::2]
        a, b = self.labels[0::2], self.labels[1::2]
        labels = np.where(a == b, a, MIXED)
        return Axis(s, labels, self.origin, self.ecs_low, self.ecs_high, 2 * self.h)


def _build_axis(spec: AxisSpec) -> Axis:
    spec.validate()
    n = int(spec.interior_points)
    h = spec.interior_length / n
    parts, labels = [np.full(n, h, dtype=complex)], [np.full(n, INTERIOR)]
    origin = 0.0 + 0.0j
    if spec.ecs_low is not None:
        w = h * np.exp(1j * spec.ecs_low.angle)
        parts.insert(0, np.full(spec.ecs_low.points, w))
        labels.insert(0, np.full(spec.ecs_low.points, ECS_LOW))
        origin = -spec.ecs_low.points * w
    if spec.ecs_high is not None:
        w = h * np.exp(1j * spec.ecs_high.angle)
        parts.append(np.full(spec.ecs_high.points, w))
        labels.append(np.full(spec.ecs_high.points, ECS_HIGH))
    return Axis(np.concatenate(parts), np.concatenate(labels), origin,
                spec.ecs_low, spec.ecs_high, h)


@dataclass(frozen=True, eq=False)
class Grid:
    axes: tuple
    level: int = 0
    _shape: tuple = field(init=False, repr=False)

    def __post_init__(self):
        if not 1 <= len(self.axes) <= 3:
            raise ConfigurationError(f"grids must be 1D, 2D or 3D, got {len(self.axes)} axes")
        object.__setattr__(self, "_shape", tuple(ax.unknowns for ax in self.axes))

    @property
    def dim(self) -> int:
        return len(self.axes)

    @property
    def shape(self) -> tuple:
        """Unknowns per axis."""
        return self._shape

    @property
    def size(self) -> int:
        return int(np.prod(self._shape))

    @property
    def spacings(self) -> list:
        return [ax.spacings for ax in self.axes]

    @property
    def coordinates(self) -> list:
        return [ax.nodes for ax in self.axes]

    @property
    def boundary_kinds(self) -> list:
        """Per axis ``(low, high)`` face kind: ``"dirichlet"`` or ``"ecs"``."""
        return [("ecs" if ax.ecs_low else "dirichlet", "ecs" if ax.ecs_high else "dirichlet")
                for ax in self.axes]

    @property
    def is_uniform_dirichlet(self) -> bool:
        return all(ax.is_uniform_real for ax in self.axes)

    def mesh(self, real: bool = True) -> list:
        """Broadcastable coordinate arrays of the unknowns (``indexing='ij'``)."""
        pts = [ax.unknown_nodes.real if real else ax.unknown_nodes for ax in self.axes]
        return np.meshgrid(*pts, indexing="ij", sparse=True)

    def coarsenable(self) -> bool:
        return all(ax.intervals % 2 == 0 and ax.intervals >= 4 for ax in self.axes)


def build_grid(spec: Sequence[AxisSpec]) -> Grid:
    """Build a tensor-product grid from one :class:`AxisSpec` per dimension."""
    if isinstance(spec, AxisSpec):
        spec = [spec]
    return Grid(tuple(_build_axis(s) for s in spec))


def coarsen_grid(g: Grid) -> Grid:
    """Keep every second node along every axis.

    Interval widths are summed pairwise, so the total complex extent of each
    axis is preserved; a pair straddling an interior/ECS interface becomes a
    single mixed interval.
    """
    return Grid(tuple(ax.coarsen() for ax in g.axes), g.level + 1)
