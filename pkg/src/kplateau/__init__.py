"""Equilibrium shapes of linked elastic loops spanning a liquid film.

The package models closed Kirchhoff rods by their curvature and twist
densities, links them, spans them with a triangulated film, and minimizes
the total energy subject to non-interpenetration and knot-type invariants.
"""

from .config import (
    RodSpec,
    ScenarioConfig,
    build_elastics,
    build_link,
    build_options,
    load_preset,
    parse_config,
    preset_names,
    serialize_config,
)
from .constraints import (
    ConstraintReport,
    admissibility,
    ciarlet_necas_residual,
    embedded_certificate,
    local_injectivity_margin,
    tube_disjointness,
)
from .energy import (
    ElasticDensity,
    EnergyReport,
    ParameterBasis,
    elastic_energy,
    loop_energy,
    loop_energy_gradient,
    realize,
    total_energy,
)
from .errors import (
    ConfigError,
    InitInadmissible,
    InvalidInput,
    InvariantBroken,
    KPlateauError,
)
from .film import init_spanning_mesh, relax_area, remesh
from .io import export_mesh, export_trace, read_obj
from .mesh import TriMesh, area
from .rod import (
    CrossSection,
    DensityField,
    Frame,
    FramedCurve,
    LinkConfig,
    Placement,
    closure_residual,
    constant_density,
    integrate_frame,
    is_closed,
    resample,
    tube_mesh,
)
from .solver import (
    PenaltyWeights,
    SolveOptions,
    SolveTrace,
    minimize_loop_only,
    penalty_energy,
    solve_kirchhoff_plateau,
)
from .topology import (
    InvariantRecord,
    crossing_linking_number,
    gauss_linking_number,
    hausdorff_distance,
    make_probe_family,
    self_linking,
    spanning_certificate,
    total_twist,
    writhe,
)

__version__ = "0.1.0"

__all__ = [
    "RodSpec",
    "ScenarioConfig",
    "build_elastics",
    "build_link",
    "build_options",
    "load_preset",
    "parse_config",
    "preset_names",
    "serialize_config",
    "ConstraintReport",
    "admissibility",
    "ciarlet_necas_residual",
    "embedded_certificate",
    "local_injectivity_margin",
    "tube_disjointness",
    "ElasticDensity",
    "EnergyReport",
    "ParameterBasis",
    "elastic_energy",
    "loop_energy",
    "loop_energy_gradient",
    "realize",
    "total_energy",
    "ConfigError",
    "InitInadmissible",
    "InvalidInput",
    "InvariantBroken",
    "KPlateauError",
    "init_spanning_mesh",
    "relax_area",
    "remesh",
    "export_mesh",
    "export_trace",
    "read_obj",
    "TriMesh",
    "area",
    "CrossSection",
    "DensityField",
    "Frame",
    "FramedCurve",
    "LinkConfig",
    "Placement",
    "closure_residual",
    "constant_density",
    "integrate_frame",
    "is_closed",
    "resample",
    "tube_mesh",
    "PenaltyWeights",
    "SolveOptions",
    "SolveTrace",
    "minimize_loop_only",
    "penalty_energy",
    "solve_kirchhoff_plateau",
    "InvariantRecord",
    "crossing_linking_number",
    "gauss_linking_number",
    "hausdorff_distance",
    "make_probe_family",
    "self_linking",
    "spanning_certificate",
    "total_twist",
    "writhe",
    "__version__",
]
