"""Dirac bilinear observables, the six-class spinor taxonomy, symmetry
verification on spinor space, and the pulled-back Dirac dynamics."""

from .algebra import (
    BIVECTOR_PAIRS,
    ETA,
    GammaBasis,
    GaussianRational,
    InternalConsistencyError,
    Matrix4,
    SingularMatrix,
    SpinorForgeError,
    build_gamma_basis,
    clifford_residual,
    gamma_basis_expand,
    gamma_basis_reconstruct,
    levi_civita,
)
from .bilinear import (
    BilinearSet,
    DualSpinor,
    FpkResiduals,
    Spinor,
    bilinears,
    dual,
    fpk_residuals,
    is_fierz_aggregate,
)
from .lounesto import (
    EXACT,
    ClassifierConfig,
    LounestoClass,
    SamplerExhausted,
    UnknownPattern,
    ZeroCurrent,
    classify,
    classify_report,
    component_relation,
    is_singular,
    random_spinor,
    sample_class,
)
from .symmetry import (
    BetaMap,
    BothBlocksZero,
    LinearlyDependent,
    NotASymmetry,
    Ray,
    SymmetryCandidate,
    ZeroSpinor,
    beta_extract,
    boost_candidate,
    charge_conjugation_candidate,
    compose,
    conjugate_action,
    group_closure,
    inverse,
    named_candidate,
    phase_consistency,
    preserves_class,
    ray_equal,
    rotation_candidate,
    scalar_candidate,
    type6_block,
    verify_rescaling_lemma,
)
from .dynamics import (
    AvatarMap,
    DensityState,
    ExoticTheta,
    FlowState,
    MassiveInput,
    OffShell,
    SpinorField,
    StepTooLarge,
    avatar_velocity,
    dirac_apply,
    exotic_density_check,
    exotic_dirac_apply,
    exotic_velocity,
    flow_divergence,
    liouville_check,
    massive_flow_report,
    plane_wave,
    pullback_state,
)

__version__ = "0.1.0"
