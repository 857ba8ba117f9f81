"""Six-class taxonomy of nonzero spinors by their bilinear nullness pattern.

The Lounesto classification sorts spinors with nonvanishing current J by
which of (K, S, omega, sigma) vanish:

    1:  K != 0,  S != 0,  omega != 0,  sigma != 0
    2:  K != 0,  S != 0,  omega != 0,  sigma  = 0
    3:  K != 0,  S != 0,  omega  = 0,  sigma != 0
    4:  K != 0,  S != 0,  omega  = 0 = sigma
    5:  K  = 0,  S != 0,  omega  = 0 = sigma
    6:  K != 0,  S  = 0,  omega  = 0 = sigma

Classes 1-3 are the regular spinors, 4-6 the singular ones.  Nullness of a
vector or tensor means every component is null.  Exact mode decides
nullness with no tolerance; float mode calls a component null when its
magnitude is at most null_tol * J_0, with J_0 = |psi|^2 setting the scale.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import IntEnum
from fractions import Fraction

from .algebra import GaussianRational, SpinorForgeError, _rat
from .bilinear import BilinearSet, Spinor, bilinears


class LounestoClass(IntEnum):
    ONE = 1
    TWO = 2
    THREE = 3
    FOUR = 4
    FIVE = 5
    SIX = 6


REGULAR_CLASSES = (LounestoClass.ONE, LounestoClass.TWO, LounestoClass.THREE)
SINGULAR_CLASSES = (LounestoClass.FOUR, LounestoClass.FIVE, LounestoClass.SIX)


class ZeroCurrent(SpinorForgeError):
    """The current J vanishes (includes psi = 0); no class is defined."""


class UnknownPattern(SpinorForgeError):
    """The nullness pattern matches none of the six classes.

    Unreachable for exact spinor-derived observables; float tolerances can
    manufacture it.  The offending pattern is attached for reporting.
    """

    def __init__(self, pattern: dict):
        self.pattern = pattern
        super().__init__(f"nullness pattern matches no class: {pattern}")


class SamplerExhausted(SpinorForgeError):
    """The per-class sampler ran out of retries (indicates a construction bug)."""


@dataclass(frozen=True)
class ClassifierConfig:
    mode: str = "exact"
    null_tol: float = 1e-9

    def __post_init__(self):
        if self.mode not in ("exact", "float"):
            raise ValueError("mode must be 'exact' or 'float'")
        if self.mode == "float" and not self.null_tol > 0:
            raise ValueError("float mode needs null_tol > 0")


EXACT = ClassifierConfig("exact")
FLOAT_DEFAULT = ClassifierConfig("float")

# (K nonzero, S nonzero, omega nonzero, sigma nonzero) -> class
_PATTERNS = {
    (True, True, True, True): LounestoClass.ONE,
    (True, True, True, False): LounestoClass.TWO,
    (True, True, False, True): LounestoClass.THREE,
    (True, True, False, False): LounestoClass.FOUR,
    (False, True, False, False): LounestoClass.FIVE,
    (True, False, False, False): LounestoClass.SIX,
}


def _null(value, cfg: ClassifierConfig, scale) -> bool:
    if cfg.mode == "exact":
        return not value
    return abs(value) <= cfg.null_tol * scale


def _pattern_flags(bset: BilinearSet, cfg: ClassifierConfig):
    scale = bset.J[0] if cfg.mode == "float" else None
    sigma_null = _null(bset.sigma, cfg, scale)
    omega_null = _null(bset.omega, cfg, scale)
    k_null = all(_null(k, cfg, scale) for k in bset.K)
    s_null = all(_null(e, cfg, scale) for row in bset.S for e in row)
    j_null = all(_null(j, cfg, scale) for j in bset.J)
    return j_null, k_null, s_null, omega_null, sigma_null


def _class_from_flags(k_null, s_null, omega_null, sigma_null) -> LounestoClass:
    key = (not k_null, not s_null, not omega_null, not sigma_null)
    cls = _PATTERNS.get(key)
    if cls is None:
        raise UnknownPattern(
            {
                "K_nonzero": key[0],
                "S_nonzero": key[1],
                "omega_nonzero": key[2],
                "sigma_nonzero": key[3],
            }
        )
    return cls


@dataclass(frozen=True)
class ClassificationReport:
    lounesto_class: LounestoClass
    singular: bool
    pattern: dict
    bilinear_set: BilinearSet


def classify_report(psi: Spinor, cfg: ClassifierConfig = EXACT) -> ClassificationReport:
    """Classify and return the full nullness pattern alongside the observables."""
    if cfg.mode == "float" and psi.mode == "exact":
        psi = psi.to_float()
    elif cfg.mode == "exact" and psi.mode == "float":
        raise ValueError("exact classification needs an exact spinor")
    bset = bilinears(psi)
    j_null, k_null, s_null, omega_null, sigma_null = _pattern_flags(bset, cfg)
    if j_null:
        raise ZeroCurrent("current J vanishes; spinor is unclassifiable")
    cls = _class_from_flags(k_null, s_null, omega_null, sigma_null)
    pattern = {
        "K_nonzero": not k_null,
        "S_nonzero": not s_null,
        "omega_nonzero": not omega_null,
        "sigma_nonzero": not sigma_null,
    }
    return ClassificationReport(cls, cls in SINGULAR_CLASSES, pattern, bset)


def classify(psi: Spinor, cfg: ClassifierConfig = EXACT) -> LounestoClass:
    """The class 1..6 of `psi`; raises ZeroCurrent / UnknownPattern."""
    return classify_report(psi, cfg).lounesto_class


def is_singular(psi: Spinor, cfg: ClassifierConfig = EXACT) -> bool:
    """True for classes 4-6, i.e. sigma and omega both null."""
    return classify(psi, cfg) in SINGULAR_CLASSES


def component_relation(psi: Spinor) -> bool:
    """Auxiliary component predicate a * |c|^2 == b * c * conj(d).

    Convention dependent: it is not equivalent to singularity in the frozen
    Weyl representation (for example (1,1,1,-1) is singular but violates
    it), so it plays no role in `classify`.  Requires c != 0.
    """
    a, b, c, d = psi.components
    if not bool(c):
        raise ValueError("component relation needs c != 0")
    if psi.mode == "exact":
        return a * c.abs_sq() == b * c * d.conjugate()
    return abs(a * abs(c) ** 2 - b * c * d.conjugate()) <= 1e-12 * max(psi.norm_sq(), 1e-300)


# ---------------------------------------------------------------------------
# Per-class samplers (exact mode, deterministic per seed)
# ---------------------------------------------------------------------------


def random_rational(rng: random.Random, span: int = 9, max_den: int = 4):
    return _rat(Fraction(rng.randint(-span, span), rng.randint(1, max_den)))


def random_gaussian_rational(rng: random.Random, span: int = 9, max_den: int = 4) -> GaussianRational:
    return GaussianRational(random_rational(rng, span, max_den), random_rational(rng, span, max_den))


def random_spinor(rng: random.Random, span: int = 9, max_den: int = 4) -> Spinor:
    """A random exact spinor with small rational components."""
    return Spinor([random_gaussian_rational(rng, span, max_den) for _ in range(4)])


_UNIT_RATIONALS = (
    GaussianRational(1),
    GaussianRational(-1),
    GaussianRational(0, 1),
    GaussianRational(0, -1),
    GaussianRational(Fraction(3, 5), Fraction(4, 5)),
    GaussianRational(Fraction(3, 5), Fraction(-4, 5)),
    GaussianRational(Fraction(-4, 5), Fraction(3, 5)),
    GaussianRational(Fraction(5, 13), Fraction(12, 13)),
)


def _nonzero_gr(rng) -> GaussianRational:
    while True:
        g = random_gaussian_rational(rng)
        if g:
            return g


def _candidate_class1(rng) -> Spinor:
    return random_spinor(rng)


def _candidate_class2(rng) -> Spinor:
    # sigma = 2 Re(a* c + b* d) = 0 with omega != 0: force a* c + b* d purely
    # imaginary and nonzero by solving for d.
    a = random_gaussian_rational(rng)
    b = _nonzero_gr(rng)
    c = random_gaussian_rational(rng)
    y = random_rational(rng)
    if not y:
        y = _rat(1)
    target = GaussianRational(0, y)
    d = (target - a.conjugate() * c) / b.conjugate()
    return Spinor([a, b, c, d])


def _candidate_class3(rng) -> Spinor:
    # omega = -2 Im(a* c + b* d) = 0 with sigma != 0: force the inner product real.
    a = random_gaussian_rational(rng)
    b = _nonzero_gr(rng)
    c = random_gaussian_rational(rng)
    x = random_rational(rng)
    if not x:
        x = _rat(1)
    target = GaussianRational(x, 0)
    d = (target - a.conjugate() * c) / b.conjugate()
    return Spinor([a, b, c, d])


def _candidate_class4(rng) -> Spinor:
    # a* c + b* d = 0 makes sigma = omega = 0; K and S stay nonzero generically.
    a = random_gaussian_rational(rng)
    b = _nonzero_gr(rng)
    c = _nonzero_gr(rng)
    d = -(a.conjugate() * c) / b.conjugate()
    return Spinor([a, b, c, d])


def _candidate_class5(rng) -> Spinor:
    # Charge-conjugation structure (a, b, lam*conj(b), -lam*conj(a)) with
    # |lam| = 1 cancels K componentwise while keeping S nonzero.
    a = random_gaussian_rational(rng)
    b = random_gaussian_rational(rng)
    if not (a or b):
        a = GaussianRational(1)
    lam = _UNIT_RATIONALS[rng.randrange(len(_UNIT_RATIONALS))]
    return Spinor([a, b, lam * b.conjugate(), -(lam * a.conjugate())])


def _candidate_class6(rng) -> Spinor:
    a, b = _nonzero_gr(rng), random_gaussian_rational(rng)
    zero = GaussianRational()
    if rng.random() < 0.5:
        return Spinor([a, b, zero, zero])
    return Spinor([zero, zero, a, b])


_CANDIDATES = {
    LounestoClass.ONE: _candidate_class1,
    LounestoClass.TWO: _candidate_class2,
    LounestoClass.THREE: _candidate_class3,
    LounestoClass.FOUR: _candidate_class4,
    LounestoClass.FIVE: _candidate_class5,
    LounestoClass.SIX: _candidate_class6,
}


def sample_class(target, seed: int, max_tries: int = 200) -> Spinor:
    """A random rational-component spinor of the requested class.

    Structured candidates are drawn (rejection sampling for class 1, solved
    linear constraints for 2-4, conjugation-structured components for 5,
    chiral blocks for 6) and verified with the exact classifier before
    being returned; the construction never trusts itself.
    """
    target = LounestoClass(target)
    rng = random.Random(seed)
    make = _CANDIDATES[target]
    for _ in range(max_tries):
        psi = make(rng)
        try:
            if classify(psi, EXACT) == target:
                return psi
        except ZeroCurrent:
            continue
    raise SamplerExhausted(f"no class-{int(target)} spinor after {max_tries} tries")
