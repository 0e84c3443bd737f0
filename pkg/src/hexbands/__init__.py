"""Band structure of a semi-rigid hexagonal quantum graph with vertex masses."""

from .dispersion import (
    DIRAC_MOMENTA,
    DValues,
    Quasimomentum,
    bloch_matrix,
    d_values,
    delta_eval,
    dispersion_residual,
    s_abs,
    s_complex,
    s_magnitude,
)
from .errors import (
    ClassificationError,
    DomainError,
    NumericalError,
    ParameterError,
    RangeError,
    SingularityError,
    SymmetryError,
)
from .oracle import bloch_eigs_fd, compare_dispersion
from .potential import (
    Potential,
    check_symmetry,
    evaluate,
    from_samples,
    load_tabulated,
    make_builtin,
    parse_potential,
)
from .spectrum import (
    SpectrumReport,
    classify_free_edges,
    dirac_points,
    dirac_roots,
    full_report,
    scan_bands,
    sigma0_roots,
    solve_bloch_levels,
    surface_grid,
)
from .transfer import MonodromyMatrix, Params, monodromy, monodromy_free, monodromy_numeric, psi_boundary

__version__ = "0.1.0"
