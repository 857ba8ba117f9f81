"""Class-preserving transformations of spinor space.

A candidate transformation is a 4x4 matrix S acting as psi -> S psi
(or psi -> S conj(psi) for anti-linear candidates).  Its effect on every
bilinear observable is captured by sandwiching each observable kernel:

    Gamma  ->  gamma^0 S^dagger gamma^0 Gamma S

For a genuine symmetry each of the five sectors (scalar, vector,
bivector, axial, pseudoscalar) maps into itself; the sector transforms
are real matrices, scalar multiples of the identity in the strict case.
Invertible candidates obey the rescaling constraint alpha = +/- beta
between the scalar and pseudoscalar factors, and the invertible
candidates close into a matrix group, which `group_closure` explores
mechanically.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Sequence

from .algebra import (
    BIVECTOR_PAIRS,
    GammaBasis,
    GaussianRational,
    InternalConsistencyError,
    Matrix4,
    SingularMatrix,
    SpinorForgeError,
    _rat,
    build_gamma_basis,
    is_exact,
    kernel_expand,
    magnitude,
)
from .bilinear import Spinor, bilinears, is_fierz_aggregate
from .lounesto import (
    EXACT,
    ClassifierConfig,
    LounestoClass,
    ZeroCurrent,
    classify,
    sample_class,
)

BETA_TOL = 1e-10  # float mode: relative size below which a coefficient is null


class NotASymmetry(SpinorForgeError):
    """The candidate leaks some observable sector into another."""

    def __init__(self, label: str, leaks: dict):
        self.label = label
        self.leaks = leaks
        super().__init__(f"sector leak when transforming {label}: {leaks}")


class BothBlocksZero(SpinorForgeError):
    """type6_block was given two vanishing blocks."""


class ZeroSpinor(SpinorForgeError):
    """Ray operations need nonzero spinors."""


class LinearlyDependent(SpinorForgeError):
    """phase_consistency needs linearly independent spinors."""


@dataclass(frozen=True)
class SymmetryCandidate:
    """A 4x4 matrix with an optional anti-linear flag and label."""

    matrix: Matrix4
    antilinear: bool = False
    label: str | None = None

    @property
    def mode(self) -> str:
        return self.matrix.mode

    def apply(self, psi: Spinor) -> Spinor:
        """S psi, or S conj(psi) when anti-linear."""
        m = self.matrix
        if m.mode != psi.mode:
            if m.mode == "float":
                psi = psi.to_float()
            else:
                m = m.to_float()
        if self.antilinear:
            psi = psi.conjugated()
        return Spinor(m.apply(psi.components))

    def is_invertible(self) -> bool:
        d = self.matrix.det()
        if self.mode == "exact":
            return bool(d)
        return abs(d) > 1e-12 * max(1.0, self.matrix.max_abs() ** 4)

    def __repr__(self):
        name = self.label or "candidate"
        tag = ", antilinear" if self.antilinear else ""
        return f"SymmetryCandidate({name}{tag})"


@dataclass(frozen=True)
class BetaMap:
    """Per-sector transforms of the bilinear observables under a candidate.

    beta_scalar and beta_pseudo are the real factors on sigma and omega.
    l_vector and l_axial are real 4x4 matrices acting on the components of
    J and K (J'_mu = sum_nu L[mu][nu] J_nu), and l_bivector is the real 6x6
    matrix on the S components ordered like BIVECTOR_PAIRS:
    (0,1), (0,2), (0,3), (1,2), (1,3), (2,3).  `strict` is set when every
    sector transform is a scalar multiple of the identity.
    """

    beta_scalar: object
    beta_pseudo: object
    l_vector: tuple
    l_axial: tuple
    l_bivector: tuple
    strict: bool

    def sector_matrices(self) -> dict:
        return {
            "scalar": ((self.beta_scalar,),),
            "vector": self.l_vector,
            "bivector": self.l_bivector,
            "axial": self.l_axial,
            "pseudoscalar": ((self.beta_pseudo,),),
        }

    def apply_to(self, bset):
        """Transform a BilinearSet by the sector maps (for cross-checking)."""
        from .bilinear import BilinearSet

        sigma = self.beta_scalar * bset.sigma
        omega = self.beta_pseudo * bset.omega
        J = tuple(
            sum(self.l_vector[m][n] * bset.J[n] for n in range(4)) for m in range(4)
        )
        K = tuple(
            sum(self.l_axial[m][n] * bset.K[n] for n in range(4)) for m in range(4)
        )
        s_comp = [bset.S[mu][nu] for (mu, nu) in BIVECTOR_PAIRS]
        s_new = [
            sum(self.l_bivector[a][b] * s_comp[b] for b in range(6)) for a in range(6)
        ]
        zero = sigma - sigma
        S = [[zero] * 4 for _ in range(4)]
        for val, (mu, nu) in zip(s_new, BIVECTOR_PAIRS):
            S[mu][nu] = val
            S[nu][mu] = -val
        return BilinearSet(sigma, omega, J, K, tuple(tuple(r) for r in S))


def conjugate_action(candidate: SymmetryCandidate | Matrix4, gamma: Matrix4) -> Matrix4:
    """gamma^0 S^dagger gamma^0 Gamma S, the kernel transform of a linear candidate.

    For an anti-linear candidate the transformed kernel is the entrywise
    conjugate of this (valid for kernels K with gamma^0 K Hermitian, which
    covers the whole observable basis).
    """
    matrix = candidate.matrix if isinstance(candidate, SymmetryCandidate) else candidate
    antilinear = isinstance(candidate, SymmetryCandidate) and candidate.antilinear
    basis = build_gamma_basis(matrix.mode)
    g0 = basis.gammas[0]
    out = g0 @ matrix.dagger() @ g0 @ gamma @ matrix
    if antilinear:
        out = out.conj()
    return out


def _null_coeff(c, tol, scale) -> bool:
    if is_exact(c):
        return not c
    return abs(c) <= tol * max(scale, 1e-300)


def beta_extract(
    candidate: SymmetryCandidate | Matrix4,
    basis: GammaBasis | None = None,
    tol: float = BETA_TOL,
) -> BetaMap:
    """Sector transforms of a candidate, or NotASymmetry on sector leakage.

    Each observable kernel is conjugated and re-expanded over the kernel
    basis; coefficients landing outside the source sector disqualify the
    candidate.  Within-sector coefficients are real by the Hermiticity
    structure of the kernels; a violation would be an internal bug.
    """
    if isinstance(candidate, Matrix4):
        candidate = SymmetryCandidate(candidate)
    if basis is None:
        basis = build_gamma_basis(candidate.mode)
    matrix = candidate.matrix
    g0 = basis.gammas[0]
    left = g0 @ matrix.dagger() @ g0  # shared prefix of every sandwich

    coeff_rows = []
    for k in basis.kernels:
        transformed = left @ k.matrix @ matrix
        if candidate.antilinear:
            transformed = transformed.conj()
        coeff_rows.append(kernel_expand(transformed, basis))

    scale = max(magnitude(c) for row in coeff_rows for c in row)
    if not is_exact(coeff_rows[0][0]):
        scale = float(scale)

    sectors = {"scalar": 1, "vector": 4, "bivector": 6, "axial": 4, "pseudoscalar": 1}
    blocks = {name: [[None] * dim for _ in range(dim)] for name, dim in sectors.items()}
    for src, row in zip(basis.kernels, coeff_rows):
        for dst, c in zip(basis.kernels, row):
            if dst.sector == src.sector:
                blocks[src.sector][src.slot][dst.slot] = c
            elif not _null_coeff(c, tol, scale):
                raise NotASymmetry(
                    src.label, {dst.label: str(c)}
                )

    def realized(block):
        out = []
        for row in block:
            vals = []
            for c in row:
                im = c.im if is_exact(c) else c.imag
                if is_exact(c):
                    if im:
                        raise InternalConsistencyError("sector coefficient not real")
                    vals.append(c.re)
                else:
                    if abs(im) > tol * max(scale, 1e-300):
                        raise InternalConsistencyError("sector coefficient not real")
                    vals.append(c.real)
            out.append(tuple(vals))
        return tuple(out)

    real_blocks = {name: realized(b) for name, b in blocks.items()}

    def is_scaled_identity(block):
        dim = len(block)
        lead = block[0][0]
        for i in range(dim):
            for j in range(dim):
                want = lead if i == j else lead - lead
                diff = block[i][j] - want
                if is_exact(coeff_rows[0][0]):
                    if diff:
                        return False
                elif abs(diff) > tol * max(scale, 1e-300):
                    return False
        return True

    strict = all(is_scaled_identity(b) for b in real_blocks.values())
    return BetaMap(
        beta_scalar=real_blocks["scalar"][0][0],
        beta_pseudo=real_blocks["pseudoscalar"][0][0],
        l_vector=real_blocks["vector"],
        l_axial=real_blocks["axial"],
        l_bivector=real_blocks["bivector"],
        strict=strict,
    )


# ---------------------------------------------------------------------------
# Semantic check: sampled class preservation
# ---------------------------------------------------------------------------


@dataclass
class ClassPreservationReport:
    label: str
    lounesto_class: int
    n: int
    preserved: int
    zero_current: int
    invertible: bool
    fpk_violations: int
    failures: list = field(default_factory=list)  # (input, resulting class) pairs

    @property
    def passed(self) -> bool:
        if self.failures or self.fpk_violations:
            return False
        if self.invertible and self.zero_current:
            return False
        return True

    def as_dict(self) -> dict:
        return {
            "label": self.label,
            "class": self.lounesto_class,
            "n": self.n,
            "preserved": self.preserved,
            "zero_current": self.zero_current,
            "invertible": self.invertible,
            "fpk_violations": self.fpk_violations,
            "failures": [
                {"spinor": [str(c) for c in psi.components], "got": got}
                for psi, got in self.failures[:10]
            ],
            "passed": self.passed,
        }


def preserves_class(
    candidate: SymmetryCandidate | Matrix4,
    lounesto_class,
    n: int = 100,
    seed: int = 0,
    fpk_tol: float = 1e-8,
) -> ClassPreservationReport:
    """Sample class-i spinors, transform them, and reclassify.

    Results with vanishing current are discarded (but counted) only when
    the candidate is not invertible; for invertible candidates they count
    as failures.  Transformed observables are also required to satisfy the
    FPK relations.
    """
    if isinstance(candidate, Matrix4):
        candidate = SymmetryCandidate(candidate)
    target = LounestoClass(lounesto_class)
    rng = random.Random(seed)
    float_side = candidate.mode == "float"
    cfg = ClassifierConfig("float") if float_side else EXACT
    invertible = candidate.is_invertible()

    report = ClassPreservationReport(
        label=candidate.label or "candidate",
        lounesto_class=int(target),
        n=n,
        preserved=0,
        zero_current=0,
        invertible=invertible,
        fpk_violations=0,
    )
    for _ in range(n):
        psi = sample_class(target, rng.getrandbits(48))
        image = candidate.apply(psi.to_float() if float_side else psi)
        try:
            got = classify(image, cfg)
        except ZeroCurrent:
            report.zero_current += 1
            if invertible:
                report.failures.append((psi, None))
            continue
        bset = bilinears(image)
        tol = 0.0 if bset.mode == "exact" else fpk_tol * max(1.0, float(image.norm_sq())) ** 2
        if not is_fierz_aggregate(bset, tol):
            report.fpk_violations += 1
        if got == target:
            report.preserved += 1
        else:
            report.failures.append((psi, int(got)))
    return report


# ---------------------------------------------------------------------------
# Rescaling constraint, composition, inversion
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RescalingReport:
    alpha: object
    beta: object
    holds: bool
    determinant_consistent: bool


def verify_rescaling_lemma(
    candidate: SymmetryCandidate | Matrix4,
    basis: GammaBasis | None = None,
    tol: float = BETA_TOL,
) -> RescalingReport:
    """Check alpha = +/- beta between the scalar and pseudoscalar factors.

    Requires an invertible, sector-preserving candidate (the scalar and
    pseudoscalar sectors are one-dimensional, so their factors are defined
    whenever beta_extract succeeds, strict or not).  Also confirms
    alpha^4 = beta^4 through determinants of the conjugation relation
    alpha S^-1 gamma^5 S = beta gamma^5.
    """
    if isinstance(candidate, Matrix4):
        candidate = SymmetryCandidate(candidate)
    if not candidate.is_invertible():
        raise SingularMatrix("rescaling constraint applies to invertible candidates")
    if basis is None:
        basis = build_gamma_basis(candidate.mode)
    bmap = beta_extract(candidate, basis, tol)
    alpha, beta = bmap.beta_scalar, bmap.beta_pseudo

    exact = candidate.mode == "exact"
    if exact:
        holds = alpha == beta or alpha == -beta
    else:
        scale = max(abs(alpha), abs(beta), 1e-300)
        holds = min(abs(alpha - beta), abs(alpha + beta)) <= tol * scale

    lhs = (candidate.matrix.inv() @ basis.gamma5 @ candidate.matrix * alpha).det()
    rhs = (basis.gamma5 * beta).det()
    if exact:
        det_ok = lhs == rhs
    else:
        det_ok = abs(lhs - rhs) <= tol * max(abs(lhs), abs(rhs), 1e-300)
    return RescalingReport(alpha, beta, holds, det_ok)


def compose(s1: SymmetryCandidate, s2: SymmetryCandidate) -> SymmetryCandidate:
    """The candidate acting as s1 after s2 (matrix product for linear pairs)."""
    m2 = s2.matrix
    if s1.mode != s2.mode:
        m2 = m2.to_float()
        s1 = SymmetryCandidate(s1.matrix.to_float(), s1.antilinear, s1.label)
    if s1.antilinear:
        m2 = m2.conj()
    label = None
    if s1.label and s2.label:
        label = f"{s1.label}*{s2.label}"
    return SymmetryCandidate(
        s1.matrix @ m2, antilinear=s1.antilinear != s2.antilinear, label=label
    )


def inverse(candidate: SymmetryCandidate) -> SymmetryCandidate:
    """Inverse candidate; sector transforms invert alongside."""
    inv_m = candidate.matrix.inv()
    if candidate.antilinear:
        inv_m = inv_m.conj()
    label = f"{candidate.label}^-1" if candidate.label else None
    return SymmetryCandidate(inv_m, candidate.antilinear, label)


def type6_block(a, b, layout: str = "diag") -> SymmetryCandidate:
    """Assemble the block form [[A,0],[0,B]] or [[0,A],[B,0]] from 2x2 blocks."""
    if layout not in ("diag", "antidiag"):
        raise ValueError("layout must be 'diag' or 'antidiag'")
    a = tuple(tuple(r) for r in a)
    b = tuple(tuple(r) for r in b)
    if len(a) != 2 or len(b) != 2 or any(len(r) != 2 for r in a + b):
        raise ValueError("blocks must be 2x2")
    def nonzero(blk):
        return any(bool(e) for r in blk for e in r)

    if not nonzero(a) and not nonzero(b):
        raise BothBlocksZero("at least one block must be nonzero")
    sample = next(e for r in (a + b) for e in r)
    mode = "exact" if is_exact(sample) or isinstance(sample, int) else "float"
    zero = GaussianRational() if mode == "exact" else 0j

    def coerce(blk):
        out = []
        for r in blk:
            row = []
            for e in r:
                if mode == "exact":
                    row.append(e if is_exact(e) else GaussianRational(_rat(e)))
                else:
                    row.append(complex(e))
            out.append(tuple(row))
        return tuple(out)

    a, b = coerce(a), coerce(b)
    z2 = ((zero, zero), (zero, zero))
    if layout == "diag":
        matrix = Matrix4.from_blocks(a, z2, z2, b)
    else:
        matrix = Matrix4.from_blocks(z2, a, b, z2)
    return SymmetryCandidate(matrix, label=f"type6-{layout}")


# ---------------------------------------------------------------------------
# Rays and phases
# ---------------------------------------------------------------------------


class Ray:
    """Equivalence class of a nonzero spinor under unit-modulus scaling."""

    __slots__ = ("representative",)

    def __init__(self, representative: Spinor):
        if representative.is_zero:
            raise ZeroSpinor("rays are defined for nonzero spinors")
        self.representative = representative

    def __eq__(self, other):
        if not isinstance(other, Ray):
            return NotImplemented
        return ray_equal(self.representative, other.representative)

    __hash__ = None  # phase-invariant hashing is not provided

    def contains(self, psi: Spinor) -> bool:
        return ray_equal(self.representative, psi)

    def __repr__(self):
        return f"Ray({self.representative!r})"


def ray_equal(psi1: Spinor, psi2: Spinor, tol: float = 1e-10) -> bool:
    """True when psi2 = exp(i alpha) psi1 for some real alpha."""
    if psi1.is_zero or psi2.is_zero:
        raise ZeroSpinor("rays are defined for nonzero spinors")
    if psi1.mode != psi2.mode:
        psi1, psi2 = psi1.to_float(), psi2.to_float()
    pivot = next(i for i, c in enumerate(psi1.components) if bool(c))
    z = psi2.components[pivot] / psi1.components[pivot]
    if psi1.mode == "exact":
        if z.abs_sq() != 1:
            return False
        return all(b == z * a for a, b in zip(psi1.components, psi2.components))
    scale = max(abs(c) for c in psi1.components)
    if abs(abs(z) - 1.0) > tol:
        return False
    return all(
        abs(b - z * a) <= tol * scale for a, b in zip(psi1.components, psi2.components)
    )


def _linearly_dependent(psi_m: Spinor, psi_n: Spinor, tol: float) -> bool:
    comps_m, comps_n = psi_m.components, psi_n.components
    exact = psi_m.mode == "exact" and psi_n.mode == "exact"
    if exact:
        for i in range(4):
            for j in range(i + 1, 4):
                if comps_m[i] * comps_n[j] - comps_m[j] * comps_n[i]:
                    return False
        return True
    cm = [complex(c) if not is_exact(c) else c.to_complex() for c in comps_m]
    cn = [complex(c) if not is_exact(c) else c.to_complex() for c in comps_n]
    scale = max(abs(x) for x in cm) * max(abs(x) for x in cn)
    worst = max(
        abs(cm[i] * cn[j] - cm[j] * cn[i]) for i in range(4) for j in range(i + 1, 4)
    )
    return worst <= tol * max(scale, 1e-300)


def phase_consistency(
    psi_m: Spinor,
    psi_n: Spinor,
    phi_m: float,
    phi_n: float,
    tol: float = 1e-9,
) -> float | None:
    """Common phase of exp(i phi_m) psi_m + exp(i phi_n) psi_n, if one exists.

    For linearly independent spinors the sum factors as
    exp(i phi_mn) (psi_m + psi_n) exactly when phi_m and phi_n agree
    modulo 2 pi, in which case phi_mn = phi_m; otherwise returns None.
    The sum psi_m + psi_n need not share the class of its parts; no class
    interpretation is attached to the returned phase.
    """
    if psi_m.is_zero or psi_n.is_zero:
        raise ZeroSpinor("phase consistency needs nonzero spinors")
    if _linearly_dependent(psi_m, psi_n, tol):
        raise LinearlyDependent("spinors are proportional")
    delta = (phi_m - phi_n) % (2 * math.pi)
    if min(delta, 2 * math.pi - delta) <= tol:
        return phi_m
    return None


# ---------------------------------------------------------------------------
# Named candidates and finite closure
# ---------------------------------------------------------------------------


def named_candidate(name: str, mode: str = "exact") -> SymmetryCandidate:
    """Named shortcut matrices: identity, gamma0..gamma3, gamma5, parity.

    A leading '-' negates, so '-identity' is the central element -I.
    """
    negate = name.startswith("-")
    base = name[1:] if negate else name
    basis = build_gamma_basis(mode)
    table = {
        "identity": basis.identity,
        "gamma0": basis.gammas[0],
        "gamma1": basis.gammas[1],
        "gamma2": basis.gammas[2],
        "gamma3": basis.gammas[3],
        "gamma5": basis.gamma5,
        "parity": basis.gammas[0],
    }
    if base not in table:
        raise KeyError(f"unknown candidate name {name!r}")
    matrix = -table[base] if negate else table[base]
    return SymmetryCandidate(matrix, label=name)


def scalar_candidate(c, mode: str = "exact") -> SymmetryCandidate:
    """c * identity."""
    basis = build_gamma_basis(mode)
    if mode == "exact" and not isinstance(c, GaussianRational):
        c = GaussianRational(_rat(c))
    return SymmetryCandidate(basis.identity * c, label=f"{c}*I")


def rotation_candidate(plane=(1, 2), cos_sin=None, theta: float | None = None) -> SymmetryCandidate:
    """exp(theta gamma^a gamma^b) for a spatial plane (a, b).

    The generator squares to -I, so the exponential is
    cos(theta) I + sin(theta) gamma^a gamma^b.  Passing an exact rational
    (cos, sin) pair on the unit circle keeps the candidate exact.
    """
    a, b = plane
    if not (1 <= a <= 3 and 1 <= b <= 3 and a != b):
        raise ValueError("rotation plane needs two distinct spatial indices")
    if cos_sin is not None:
        c, s = (_rat(x) for x in cos_sin)
        if c * c + s * s != 1:
            raise ValueError("cos^2 + sin^2 must equal 1 exactly")
        basis = build_gamma_basis("exact")
        gen = basis.gammas[a] @ basis.gammas[b]
        matrix = basis.identity * GaussianRational(c) + gen * GaussianRational(s)
    else:
        basis = build_gamma_basis("float")
        gen = basis.gammas[a] @ basis.gammas[b]
        matrix = basis.identity * complex(math.cos(theta)) + gen * complex(math.sin(theta))
    return SymmetryCandidate(matrix, label=f"rot({a}{b})")


def boost_candidate(axis: int = 1, cosh_sinh=None, eta: float | None = None) -> SymmetryCandidate:
    """exp(eta gamma^0 gamma^i); the generator squares to +I.

    Passing an exact rational (cosh, sinh) pair with cosh^2 - sinh^2 = 1
    keeps the candidate exact.
    """
    if not 1 <= axis <= 3:
        raise ValueError("boost axis must be spatial")
    if cosh_sinh is not None:
        ch, sh = (_rat(x) for x in cosh_sinh)
        if ch * ch - sh * sh != 1:
            raise ValueError("cosh^2 - sinh^2 must equal 1 exactly")
        basis = build_gamma_basis("exact")
        gen = basis.gammas[0] @ basis.gammas[axis]
        matrix = basis.identity * GaussianRational(ch) + gen * GaussianRational(sh)
    else:
        basis = build_gamma_basis("float")
        gen = basis.gammas[0] @ basis.gammas[axis]
        matrix = basis.identity * complex(math.cosh(eta)) + gen * complex(math.sinh(eta))
    return SymmetryCandidate(matrix, label=f"boost({axis})")


def charge_conjugation_candidate(mode: str = "exact") -> SymmetryCandidate:
    """The anti-linear candidate psi -> i gamma^2 conj(psi)."""
    basis = build_gamma_basis(mode)
    i_unit = GaussianRational(0, 1) if mode == "exact" else 1j
    return SymmetryCandidate(basis.gammas[2] * i_unit, antilinear=True, label="C")


@dataclass
class GroupClosureReport:
    elements: list  # (word, SymmetryCandidate)
    closed: bool
    product_closed: bool
    inverse_closed: bool
    associative: bool
    truncated: bool

    @property
    def size(self) -> int:
        return len(self.elements)

    def as_dict(self) -> dict:
        return {
            "size": self.size,
            "closed": self.closed,
            "product_closed": self.product_closed,
            "inverse_closed": self.inverse_closed,
            "associative": self.associative,
            "truncated": self.truncated,
            "words": [w for w, _ in self.elements],
        }


def _candidate_key(c: SymmetryCandidate):
    return (c.antilinear, c.matrix.rows)


def _find_close(c: SymmetryCandidate, elements, tol: float):
    for idx, (_, other) in enumerate(elements):
        if other.antilinear != c.antilinear:
            continue
        if (other.matrix - c.matrix).max_abs() <= tol:
            return idx
    return None


def group_closure(
    generators: Sequence[SymmetryCandidate],
    max_word_len: int = 4,
    tol: float = 1e-9,
    max_elements: int = 4096,
) -> GroupClosureReport:
    """Multiplicative closure of a finite generating set, up to a word bound.

    Generators and their inverses form the alphabet; products are explored
    breadth-first up to `max_word_len` letters.  The report states whether
    the resulting set is closed under products and inverses, which is the
    mechanical content of the group property for finite sets.
    """
    exact = all(g.mode == "exact" for g in generators)
    alphabet = []
    for g in generators:
        alphabet.append((g.label or "g", g))
        if g.is_invertible():
            inv = inverse(g)
            alphabet.append((inv.label or "g^-1", inv))

    elements: list = []
    seen = set()

    def add(word, cand):
        if exact:
            key = _candidate_key(cand)
            if key in seen:
                return False
            seen.add(key)
        else:
            if _find_close(cand, elements, tol) is not None:
                return False
        elements.append((word, cand))
        return True

    frontier = []
    for word, g in alphabet:
        if add(word, g):
            frontier.append((word, g))
    truncated = False
    for _ in range(max_word_len - 1):
        new_frontier = []
        for word, g in frontier:
            for lw, letter in alphabet:
                cand = compose(g, letter)
                if len(elements) >= max_elements:
                    truncated = True
                    break
                if add(f"{word}*{lw}", cand):
                    new_frontier.append((f"{word}*{lw}", cand))
            if truncated:
                break
        frontier = new_frontier
        if truncated or not frontier:
            break

    def contains(cand):
        if exact:
            return _candidate_key(cand) in seen
        return _find_close(cand, elements, tol) is not None

    product_closed = all(
        contains(compose(a, b)) for _, a in elements for _, b in elements
    )
    inverse_closed = all(
        c.is_invertible() and contains(inverse(c)) for _, c in elements
    )

    def _triple_ok(a, b, c):
        left = compose(compose(a, b), c)
        right = compose(a, compose(b, c))
        if left.antilinear != right.antilinear:
            return False
        diff = (left.matrix - right.matrix).max_abs()
        if exact:
            return not diff
        return diff <= tol * max(1.0, float(left.matrix.max_abs()))

    rng = random.Random(0)
    n = len(elements)
    if n and n**3 <= 512:
        triples = [
            (a, b, c) for _, a in elements for _, b in elements for _, c in elements
        ]
    elif n:
        triples = [
            tuple(elements[rng.randrange(n)][1] for _ in range(3)) for _ in range(200)
        ]
    else:
        triples = []
    associative = all(_triple_ok(a, b, c) for a, b, c in triples)
    return GroupClosureReport(
        elements=elements,
        closed=product_closed and inverse_closed and associative,
        product_closed=product_closed,
        inverse_closed=inverse_closed,
        associative=associative,
        truncated=truncated,
    )
