"""Exact Lyapunov stability for coalgebraic systems on finite spaces."""

from .core import (
    ClassK,
    FiniteSpace,
    GeneralizedElement,
    HorizonExceeded,
    InputError,
    MeasureScale,
    Metric,
    StateFunction,
    TimeMonoid,
    ValidationReport,
    as_fraction,
    classk_validate,
    metric_validate,
    norm_to_generalized,
    norm_to_point,
)
from .flows import (
    Flow,
    IncompleteSystemError,
    Orbit,
    derivative,
    equilibrium_check,
    equilibrium_check_sys,
    forward_invariant_check,
    integral,
    is_flow,
    orbit,
)
from .functors import (
    ONE,
    Dist,
    FinDist,
    FOrder,
    Functor,
    Identity,
    Labeled,
    Powerset,
    check_monoidal_laws,
    fmap,
    forder_violations,
    fvalue_leq,
    laxator,
)
from .lyapunov import (
    Certificate,
    DynamicSetting,
    LawSizes,
    PreconditionError,
    Verdict,
    certify,
    comparison_lemma_check,
    converse_construct,
    flow_decrescent_check,
    flow_decrescent_failures,
    positive_definite_check,
    stability_oracle,
    system_decrescent_check,
    system_decrescent_failures,
    validate_setting,
)
from .systems import (
    Coalgebra,
    UnitClock,
    behavioral_lts,
    build_L,
    is_solution,
    is_system_morphism,
    is_T_complete,
    is_trajectory,
    stationary,
    tensor,
    unit_clock,
)

__version__ = "0.1.0"
