"""toposlab: a finite-model laboratory for geometric morphisms between
presheaf toposes on finite categories."""

__version__ = "0.1.0"

from .cat import (
    CatPresentation,
    FinCategory,
    FinFunctor,
    NotFinitelyClosed,
    cauchy_completion,
    close_presentation,
    compose_functors,
    enumerate_functors,
    find_isomorphism,
    has_strict_terminal,
    identity_functor,
    is_groupoid,
    make_category,
    opposite,
    right_inv_implies_iso,
    slice_category,
    terminal_object,
    validate,
    validate_functor,
)
from .psh import (
    Presheaf,
    PresheafMap,
    category_of_elements,
    enumerate_presheaves,
    enumerate_quotients,
    exponential,
    nat_transformations,
    presheaves_isomorphic,
    validate_map,
    validate_presheaf,
    yoneda,
)
from .space import (
    FinSpace,
    NotT0,
    classify_points,
    is_jacobson,
    is_weakly_jacobson_space,
    t0_quotient,
    to_presheaf_site,
    validate_space,
)
from .geom import (
    BCSquare,
    FrobeniusInstance,
    GeomMorphism,
    ShapeMismatch,
    TriState,
    Verdict,
    Witness,
    bc_compare,
    bc_holds,
    etale_square,
    frobenius,
    inverse_image,
    is_cc_inverse_image,
    is_locally_connected,
    is_locally_connected_bounded,
    pushforward_left,
    pushforward_right,
    slice_morphism,
    validate_square,
)
from .classify import (
    SweepResult,
    ToposReport,
    check_local_center,
    classify_topos,
    counterexample_point,
    enumerate_categories,
    is_eilc_presheaf,
    is_weakly_jacobson_presheaf,
    sweep_theorems,
)
