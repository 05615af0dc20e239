"""Exact p-adic linear algebra, Grassmannian genericity and Iwasawa-module tools."""

from .errors import PadicIwasawaError
from .padic import (
    CounterStream,
    PadicMatrix,
    PadicScalar,
    SmithForm,
    rank_at_precision,
    sample_gl,
    smith_normal_form,
    stream,
    valuation,
)
from .grassmann import (
    ChartCoordinate,
    GrassmannPoint,
    enumerate_finite,
    from_chart,
    gaussian_binomial,
    in_neighborhood,
    measure_ball_exact,
    same_point,
    sample_haar,
    shear,
    to_chart,
)
from .genericity import (
    GenericityReport,
    SubmoduleFamily,
    det_certificate,
    generic_min_s,
    image_rank,
    polynomial_zero_measure,
    s_of,
    verify_generic,
)
from .series import AlphaVector, TruncatedSeries, binom_series, s_alpha
from .algebra import (
    CharIdeal,
    ElementaryModule,
    WeierstrassData,
    char_ideal,
    conclude_structure,
    dagger_pseudo_null,
    prime_to_higher_cyclotomic,
    weierstrass,
)
from .descent import (
    CatalogIdeal,
    bar_nonzero_scan,
    bar_substitute,
    companion_rep,
    descend_char,
    ideal_membership_salpha,
)
from .invariants import (
    InertiaData,
    SplittingProfile,
    check_assumption_decomp,
    d_of_k,
    s_catalog,
    s_from_inertia,
    s_prime_from_decomposition,
)
from .fukuda import (
    ClassNumberSequence,
    fit_lambda_mu_nu,
    fukuda_check,
    openness_radius,
    synthesize_tower,
)

__version__ = "0.1.0"
