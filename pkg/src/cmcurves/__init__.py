"""Class groups of imaginary quadratic orders, singular moduli, modular
polynomials, Hecke-image containment certificates for plane curves, and
split-prime censuses."""

from .census import (
    CensusRow,
    fundamental_discriminants,
    grh_bound_check,
    li,
    siegel_trend,
    split_count_lower_bound,
    split_prime_count,
)
from .cmscan import (
    CMPointRecord,
    SplitPrimeCertificate,
    cm_field_report,
    cm_points_on_curve,
    conductor_ratio_census,
    split_prime_for_certificate,
)
from .errors import CeilingError, DegenerateResultantError, PrecisionError, ValidationError
from .hecke import (
    ContainmentCertificate,
    HeckeImage,
    ModularityReport,
    PlaneCurve,
    bidegree,
    certificate_inequality,
    certify_modular,
    contains_in_hecke_image,
    hecke_image,
    identify_modular_level,
    intersection_number,
)
from .modpoly import ModularPoly, cyclic_cosets, kronecker_check, modular_poly, psi
from .moduli import (
    CMJInvariant,
    HilbertClassPoly,
    UpperHalfPoint,
    cm_j_invariants,
    hilbert_class_poly,
    inverse_j,
    j_eval,
    tau_of_form,
    torsor_act,
)
from .polys import BivarPoly, poly_from_json, poly_json
from .quadorders import (
    FormClassGroup,
    OrderDisc,
    QuadForm,
    class_number,
    class_number_table,
    compose,
    dirichlet_class_number_estimate,
    inverse,
    make_order,
    omega_odd,
    order_of_discriminant,
    reduced_forms,
    two_rank,
)

__version__ = "0.1.0"
