"""Simulated annealing for intrinsic p-means on the circle.

The backend of the trajectory kernels is reported by ``pmeans.BACKEND``:
``"compiled"`` for the Cython extension, ``"python"`` for the fallback
(forced with ``PMEANS_PURE=1``).
"""

from ._core import BACKEND
from .diagnostics import lstar_one_p2, lstar_scaling_study, wrapped_gaussian_ks
from .errors import (ConfigError, DegenerateLimitError, NoDensityError, SingularPointError,
                     StepSizeError)
from .geometry import canonical, dist, geodesic_point, jump_target, signed_gap
from .gibbs import (GibbsGrid, chi2_grid, gibbs_build, gibbs_mass, tv_grid,
                    zero_temperature_weights)
from .measures import (Empirical, Holder, PiecewiseLinearDensity, TrigPolyDensity, Uniform,
                       VonMisesMixture)
from .oracle import exact_mean_p2_empirical, grid_minimize, neighborhood_mass
from .potential import (PotentialGrid, build_grid, critical_depth, elevation, minima, u_grad,
                        u_hess, u_value)
from .schedules import LogBeta, PowerAlpha, PowerKappa, Schedule, next_jump_time, validate
from .simulator import (EnsembleSummary, SimConfig, TrajectoryRecord, run_ensemble, run_X,
                        run_Xtilde, run_Z)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "lstar_one_p2", "lstar_scaling_study", "wrapped_gaussian_ks", "ConfigError",
    "DegenerateLimitError", "NoDensityError", "SingularPointError", "StepSizeError",
    "canonical", "dist", "geodesic_point", "jump_target", "signed_gap", "GibbsGrid",
    "chi2_grid", "gibbs_build", "gibbs_mass", "tv_grid", "zero_temperature_weights",
    "Empirical", "Holder", "PiecewiseLinearDensity", "TrigPolyDensity", "Uniform",
    "VonMisesMixture", "exact_mean_p2_empirical", "grid_minimize", "neighborhood_mass",
    "PotentialGrid", "build_grid", "critical_depth", "elevation", "minima", "u_grad", "u_hess",
    "u_value", "LogBeta", "PowerAlpha", "PowerKappa", "Schedule", "next_jump_time", "validate",
    "EnsembleSummary", "SimConfig", "TrajectoryRecord", "run_ensemble", "run_X", "run_Xtilde",
    "run_Z",
]
