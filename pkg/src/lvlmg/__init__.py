"""Level-dependent multigrid for the indefinite Helmholtz equation."""

from .grid import AxisSpec, EcsLayer, Grid, build_grid, coarsen_grid
from .operator import CSG, CSL, UNPERTURBED, LevelOperator, Perturbation
from .smoother import GmresM, Polynomial, WeightedJacobi
from .cycle import CycleConfig, Hierarchy, build_hierarchy, precondition, solve, vcycle
from .problems import constant_k, ionization, wedge_2d, wedge_3d

__version__ = "0.1.0"
