"""Exact computations with formal group laws, Witt vectors, filtrations and Cartier duality."""

__version__ = "0.1.0"

from .rings import QQ, ZZ, IntegersMod, QuotientRing, RingMap, finite_field, parse_ring, truncated_polynomial_ring
from .poly import PolynomialRing
from .series import PowerSeriesRing, TruncatedSeries, series_compose, series_reversion
from .fgl import (
    FormalGroupLaw,
    additive_law,
    base_change,
    check_fgl_axioms,
    deform_to_normal_cone,
    fgl_exp,
    fgl_log,
    formal_inverse,
    height,
    law_from_coeffs,
    multiplicative_law,
    n_series,
)
from .witt import (
    WittContext,
    WittVector,
    fix_points,
    frobenius,
    sekiguchi_suwa_kernel,
    teichmuller,
    verschiebung,
    witt_polynomial,
    witt_prod_polys,
    witt_sum_polys,
)
from .filtration import (
    FilteredAlgebra,
    PresentedAlgebra,
    adic_filtration,
    associated_graded,
    check_adic_unicity,
    fiber,
    is_complete,
    rees,
    s0_fil_fibers,
)
from .cartier import (
    DividedPowerCoalgebra,
    DividedPowerHopf,
    cartier_dual,
    comultiplication_preserves_adic,
    dual_pairing_check,
    filtered_dual_weights,
    grouplike_points,
)
