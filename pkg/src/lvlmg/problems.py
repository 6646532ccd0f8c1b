"""Benchmark Helmholtz problems: constant wavenumber, wedge (2D/3D), ionization.

Every problem stores ``k^2`` (not ``k``). Wavenumber fields are evaluated at
the real projection of each unknown onto the physical domain, so ECS layers
continue the boundary value of the medium; sources vanish inside ECS layers.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .grid import DEFAULT_ECS_ANGLE, AxisSpec, ConfigurationError, Grid, build_grid

__all__ = [
    "ProblemInstance",
    "KH_LIMIT",
    "constant_k",
    "wedge_velocity",
    "wedge_2d",
    "wedge_3d",
    "ionization",
    "make_problem",
    "PROBLEMS",
]

log = logging.getLogger(__name__)

KH_LIMIT = 0.625


@dataclass(frozen=True, eq=False)
class ProblemInstance:
    grid: Grid
    k2: object
    rhs: np.ndarray
    label: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if np.shape(self.rhs) != self.grid.shape:
            raise ValueError("rhs does not match the grid")
        k2 = np.asarray(self.k2)
        if not (np.all(np.isfinite(k2)) and np.isrealobj(k2)):
            raise ValueError("k2 must be real and finite")

    @property
    def kh(self) -> float:
        """Largest ``k h`` over the grid."""
        h = max(ax.h for ax in self.grid.axes)
        return float(np.sqrt(np.max(self.k2)) * h)


def _check_kh(k: float, h: float, label: str) -> bool:
    ok = k * h <= KH_LIMIT
    if not ok:
        log.warning("%s: kh = %.3f exceeds %.3f; fewer than ~10 points per wavelength",
                    label, k * h, KH_LIMIT)
    return ok


def _physical(grid: Grid, lengths) -> list:
    """Real coordinates of the unknowns clipped onto the physical box."""
    return [np.clip(x, 0.0, L) for x, L in zip(grid.mesh(), lengths)]


def _point_source(grid: Grid, target, lengths) -> np.ndarray:
    """Unit source at the unknown nearest ``target``, kept strictly inside the box."""
    rhs = np.zeros(grid.shape, dtype=complex)
    index = []
    for ax, t, L in zip(grid.axes, target, lengths):
        x = ax.unknown_nodes.real
        inside = np.flatnonzero((np.abs(ax.unknown_nodes.imag) < 1e-12 * L)
                                & (x > 1e-12 * L) & (x < L * (1 - 1e-12)))
        index.append(int(inside[np.argmin(np.abs(x[inside] - t))]))
    rhs[tuple(index)] = 1.0
    return rhs


def constant_k(k: float, n: int, bc: str = "ecs", dim: int = 2,
               ecs_angle: float = DEFAULT_ECS_ANGLE) -> ProblemInstance:
    """Unit square (cube) with constant ``k`` and a unit point source at the centre."""
    if bc not in ("ecs", "dirichlet"):
        raise ConfigurationError(f"unknown boundary condition {bc!r}")
    if bc == "ecs":
        axes = [AxisSpec.with_ecs(n, 1.0, angle=ecs_angle) for _ in range(dim)]
    else:
        axes = [AxisSpec(n, 1.0) for _ in range(dim)]
    grid = build_grid(axes)
    _check_kh(k, 1.0 / n, "constant-k")
    rhs = _point_source(grid, [0.5] * dim, [1.0] * dim)
    return ProblemInstance(grid, float(k) ** 2, rhs, "constant-k",
                           {"k": k, "n": n, "bc": bc, "dim": dim, "ecs_angle": ecs_angle})


WEDGE_LENGTHS = (600.0, 1000.0)


def wedge_velocity(x, y):
    """Three-layer wedge velocity profile (m/s)."""
    x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
    c = np.full(x.shape, 3000.0)
    c = np.where(y < -x / 3.0 + 800.0, 1500.0, c)
    c = np.where(y < x / 6.0 + 400.0, 2000.0, c)
    return c


def wedge_2d(f: float, nx: int, ny: int, ecs_angle: float = DEFAULT_ECS_ANGLE) -> ProblemInstance:
    Lx, Ly = WEDGE_LENGTHS
    grid = build_grid([AxisSpec.with_ecs(nx, Lx, angle=ecs_angle),
                       AxisSpec.with_ecs(ny, Ly, angle=ecs_angle)])
    x, y = _physical(grid, (Lx, Ly))
    k2 = (2 * np.pi * f / wedge_velocity(x, y)) ** 2
    _check_kh(2 * np.pi * f / 1500.0, max(Lx / nx, Ly / ny), "wedge2d")
    rhs = _point_source(grid, (300.0, 0.0), (Lx, Ly))
    return ProblemInstance(grid, k2, rhs, "wedge2d",
                           {"f": f, "nx": nx, "ny": ny, "ecs_angle": ecs_angle})


def wedge_3d(f: float, nx: int, ny: int, nz: int,
             ecs_angle: float = DEFAULT_ECS_ANGLE) -> ProblemInstance:
    """Wedge extruded along ``z``; the ``z`` axis copies the ``x`` extent."""
    Lx, Ly = WEDGE_LENGTHS
    Lz = Lx
    grid = build_grid([AxisSpec.with_ecs(nx, Lx, angle=ecs_angle),
                       AxisSpec.with_ecs(ny, Ly, angle=ecs_angle),
                       AxisSpec.with_ecs(nz, Lz, angle=ecs_angle)])
    x, y, _ = _physical(grid, (Lx, Ly, Lz))
    k2 = np.broadcast_to((2 * np.pi * f / wedge_velocity(x, y)) ** 2, grid.shape).copy()
    _check_kh(2 * np.pi * f / 1500.0, max(Lx / nx, Ly / ny, Lz / nz), "wedge3d")
    rhs = _point_source(grid, (300.0, 0.0, 300.0), (Lx, Ly, Lz))
    return ProblemInstance(grid, k2, rhs, "wedge3d",
                           {"f": f, "nx": nx, "ny": ny, "nz": nz, "ecs_angle": ecs_angle})


IONIZATION_RADIUS = 50.0


def ionization(k0: float, n: int, ecs_angle: float = DEFAULT_ECS_ANGLE) -> ProblemInstance:
    """Two-electron model on ``(0, 50)^2``: Dirichlet at x=0, y=0 and ECS at x=50, y=50."""
    if not 0.0 < k0 < 5.0:
        log.warning("ionization: k0 = %g outside the usual range (0, 5)", k0)
    R = IONIZATION_RADIUS
    grid = build_grid([AxisSpec.with_ecs(n, R, low=False, angle=ecs_angle)] * 2)
    x, y = _physical(grid, (R, R))
    k2 = np.exp(-x ** 2) + np.exp(-y ** 2) + k0 ** 2
    k2 = np.broadcast_to(k2, grid.shape).copy()
    xr, yr = grid.mesh()
    inside = (xr <= R) & (yr <= R)
    rhs = np.where(inside, np.exp(-(xr ** 2 + yr ** 2)), 0.0).astype(complex)
    _check_kh(k0, R / n, "ionization")
    return ProblemInstance(grid, k2, np.broadcast_to(rhs, grid.shape).copy(), "ionization",
                           {"k0": k0, "n": n, "ecs_angle": ecs_angle})


PROBLEMS = ("constant-k", "wedge2d", "wedge3d", "ionization")


def make_problem(name: str, **params) -> ProblemInstance:
    """Construct a benchmark problem by CLI name."""

    def need(*keys):
        for key in keys:
            if params.get(key) is None:
                raise ConfigurationError(f"problem {name!r} needs --{key.replace('_', '-')}")
        return [params[key] for key in keys]

    angle = params.get("ecs_angle") or DEFAULT_ECS_ANGLE
    if name == "constant-k":
        k, n = need("k", "n")
        return constant_k(k, n, params.get("bc") or "ecs", params.get("dim") or 2, angle)
    if name == "wedge2d":
        (f,) = need("f")
        nx = params.get("nx") or need("n")[0]
        return wedge_2d(f, nx, params.get("ny") or 2 * nx, angle)
    if name == "wedge3d":
        (f,) = need("f")
        nx = params.get("nx") or need("n")[0]
        return wedge_3d(f, nx, params.get("ny") or 2 * nx, params.get("nz") or nx, angle)
    if name == "ionization":
        k0, n = need("k0", "n")
        return ionization(k0, n, angle)
    raise ConfigurationError(f"unknown problem {name!r}; choose from {', '.join(PROBLEMS)}")
