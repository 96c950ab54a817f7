"""Multispecies virial expansions from coloured-graph weights.

The package is organised around five pieces:

* :mod:`virialkit.series`  -- truncated multivariate formal power series,
* :mod:`virialkit.graphs`  -- labelled graph enumeration and block structure,
* :mod:`virialkit.weights` -- coloured-graph weights (interaction and synthetic),
* :mod:`virialkit.virial`  -- pressure series and three inversion routes,
* :mod:`virialkit.bounds`  -- convergence constants, domains, and audits,

plus a command-line front end in :mod:`virialkit.cli`.
"""

from .series import (
    FLOAT,
    RATIONAL,
    LogSeries,
    MPSeries,
    MultiIndex,
    SeriesMatrix,
    Truncation,
    admissible_indices,
    determinant,
    exp,
    log,
    power_product,
    reciprocal,
    series_from_json,
    series_to_json,
    substitute,
)
from .graphs import (
    Block,
    BlockCutTree,
    BlockDecomposition,
    ColouredGraph,
    Graph,
    articulation_points,
    block_cut_tree,
    block_decomposition,
    canonical_colouring,
    dissymmetry_check,
    enumerate_graphs,
    graph_from_json,
    graph_to_json,
    is_connected,
    is_two_connected,
)
from .weights import (
    CustomPairPotential,
    HardRods1D,
    KpSpec,
    McParams,
    McWeightSource,
    Molecule,
    PairPotential,
    SyntheticBlockModel,
    kp_check,
    model_from_json,
    model_to_json,
    pair_integral_exact,
    stability_check,
    synthetic_weight,
    weight_mc,
    zeta,
)
from .virial import (
    DensityFamily,
    InversionProblem,
    LagrangeGoodInverter,
    PressureSeries,
    TwoConnectedGF,
    VirialSeries,
    chemical_potential,
    densities,
    functional_inverse,
    invert_functional,
    invert_lagrange_good,
    invert_recursive,
    mc_pressure_series,
    pressure_from_weights,
    two_connected_gf,
    verify_ghost_relation,
    virial_from_two_connected,
    virial_inversion_problem,
)
from .bounds import (
    BoundReport,
    DomainSpec,
    SpeciesDomain,
    bound_report,
    check_coefficient_bounds,
    coefficient_sum_bound,
    density_domain,
    det_bound_constant,
    det_bound_exponent_exact,
    domain_spec_from_json,
    domain_spec_to_json,
    hypothesis_check,
    inverse_bound,
    make_domain_spec,
    virial_bound,
    z_of_rho_bound,
)

__version__ = "0.1.0"
