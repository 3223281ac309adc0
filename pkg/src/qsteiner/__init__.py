"""Computational toolkit for q-Steiner systems, with a focus on S_q(2,3,7)."""
from .design import (
    CoverageReport,
    DesignMultiset,
    admissible,
    derived_design,
    parallelism_pg3,
    spread_field_reduction,
    verify_steiner,
)
from .errors import (
    CapacityError,
    DesignError,
    DimensionError,
    FieldError,
    FormatError,
    QSDError,
    SearchInvariantError,
)
from .gf import FieldSpec, field_new
from .punctured import (
    EquationSystem,
    PuncturedParams,
    UniformSolution,
    build_equation_system,
    check_solution,
    coefficient,
    construct_s237_5,
    uniform_total,
)
from .puncture import (
    column_transform,
    enumerate_p_extensions,
    extension_up_dim,
    extensions_same_dim,
    puncture,
)
from .qsd_io import read_qsd, write_qsd
from .search import PackingState, build_ab_candidates, extend_packing, search_punctured_6
from .structure import audit_formulas, normalize_z1_z2, normalize_z1_z3, prefix_distribution_check
from .subspace import Subspace, enumerate_grassmannian, gaussian_binomial, span

__version__ = "0.1.0"
