"""Numerical verification of finite Schwarz-Pick-Ahlfors shrinking lemmas.

The modules build on one another:

* :mod:`radial_metric` -- circularly symmetric domain metrics and the
  geodesic-radius transforms ``h`` and ``H``;
* :mod:`target_surface` -- image-side charts, curvature and the Jacobi
  equation;
* :mod:`holomap` -- closed-form holomorphic maps;
* :mod:`verify` -- the checks themselves;
* :mod:`scenario`, :mod:`report`, :mod:`cli` -- files in, reports out.
"""

from .errors import (
    ConfigurationError,
    DomainError,
    FiniteSchwarzError,
    NumericalError,
    ResolutionError,
    ScenarioError,
)
from .holomap import (
    Blaschke,
    Composition,
    HoloMap,
    Identity,
    MoebiusDisk,
    Polynomial,
    Power,
    RotationScale,
    df_norm,
)
from .radial_metric import RadialMetric
from .target_surface import ConformalSurface, comparison_check, jacobi_solve
from .verify import (
    FAIL,
    HYPOTHESIS_VIOLATED,
    PASS,
    Grid,
    Scenario,
    Tolerances,
    ahlfors_limit,
    check_boundary_stretch,
    check_center_norm,
    check_hypotheses,
    check_laplacian_comparison,
    check_subharmonicity,
    verify_classical,
    verify_general_bound,
    verify_shrinking,
)

__version__ = "0.1.0"

__all__ = [
    "RadialMetric",
    "ConformalSurface",
    "comparison_check",
    "jacobi_solve",
    "Blaschke",
    "Composition",
    "ConfigurationError",
    "DomainError",
    "FAIL",
    "FiniteSchwarzError",
    "Grid",
    "HYPOTHESIS_VIOLATED",
    "HoloMap",
    "Identity",
    "MoebiusDisk",
    "NumericalError",
    "PASS",
    "Polynomial",
    "Power",
    "ResolutionError",
    "RotationScale",
    "Scenario",
    "ScenarioError",
    "Tolerances",
    "ahlfors_limit",
    "check_boundary_stretch",
    "check_center_norm",
    "check_hypotheses",
    "check_laplacian_comparison",
    "check_subharmonicity",
    "df_norm",
    "verify_classical",
    "verify_general_bound",
    "verify_shrinking",
]
