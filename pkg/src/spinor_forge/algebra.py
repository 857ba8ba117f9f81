"""Weyl-representation gamma matrices and two-mode scalar arithmetic.

Everything in this package computes against one frozen convention:

* metric signature (+, -, -, -),
* Levi-Civita symbol with eps_{0123} = +1,
* chiral (Weyl) gamma matrices: gamma^0 has identity 2x2 blocks off the
  diagonal, gamma^i carries the Pauli matrix sigma^i in its upper-right
  block and -sigma^i in the lower-left, and gamma^5 = diag(-1,-1,+1,+1).

Scalars come in two modes.  Exact mode stores Gaussian rationals, i.e.
complex numbers with rational real and imaginary parts, so zero tests
(and therefore class decisions downstream) are decidable with no
tolerance.  Float mode stores binary64 complex numbers and threads
tolerances explicitly.  The two modes never mix silently: arithmetic
between a Gaussian rational and a float raises TypeError.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence, Union

import numpy as np

try:  # gmpy2.mpq is a drop-in, much faster rational; Fraction is the fallback
    from gmpy2 import mpq as _RAT
except ImportError:  # pragma: no cover
    _RAT = Fraction

_HASH_IMAG = sys.hash_info.imag
_HASH_MOD = sys.hash_info.modulus


class SpinorForgeError(Exception):
    """Base class for all errors raised by spinor_forge."""


class InternalConsistencyError(SpinorForgeError):
    """A value violated a theorem the implementation relies on (a bug)."""


class SingularMatrix(SpinorForgeError):
    """Matrix inversion was requested for a singular matrix."""


def _rat(x):
    """Coerce to the exact rational backend.  Floats are rejected on purpose."""
    if isinstance(x, (int, str, Fraction)):
        return _RAT(x)
    if isinstance(x, type(_RAT(0))):
        return x
    raise TypeError(f"cannot build an exact rational from {type(x).__name__}")


class GaussianRational:
    """Exact complex scalar: rational real part plus rational imaginary part.

    Closed under +, -, *, / (nonzero divisor) and conjugation; equality is
    decidable.  Hashing follows the numeric tower so that, e.g.,
    GaussianRational(2) hashes like the integer 2.
    """

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = _rat(re)
        self.im = _rat(im)

    @classmethod
    def _raw(cls, re, im):
        out = object.__new__(cls)
        out.re = re
        out.im = im
        return out

    def conjugate(self):
        return GaussianRational._raw(self.re, -self.im)

    def abs_sq(self):
        """|z|^2 as an exact rational."""
        return self.re * self.re + self.im * self.im

    def to_complex(self) -> complex:
        return float(self.re) + 1j * float(self.im)

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __add__(self, other):
        if isinstance(other, GaussianRational):
            return GaussianRational._raw(self.re + other.re, self.im + other.im)
        if isinstance(other, (int, Fraction)) or isinstance(other, type(_RAT(0))):
            return GaussianRational._raw(self.re + other, self.im)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, GaussianRational):
            return GaussianRational._raw(self.re - other.re, self.im - other.im)
        if isinstance(other, (int, Fraction)) or isinstance(other, type(_RAT(0))):
            return GaussianRational._raw(self.re - other, self.im)
        return NotImplemented

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        if isinstance(other, GaussianRational):
            a, b, c, d = self.re, self.im, other.re, other.im
            return GaussianRational._raw(a * c - b * d, a * d + b * c)
        if isinstance(other, (int, Fraction)) or isinstance(other, type(_RAT(0))):
            return GaussianRational._raw(self.re * other, self.im * other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, GaussianRational):
            den = other.abs_sq()
            if not den:
                raise ZeroDivisionError("division by zero Gaussian rational")
            a, b, c, d = self.re, self.im, other.re, other.im
            return GaussianRational._raw((a * c + b * d) / den, (b * c - a * d) / den)
        if isinstance(other, (int, Fraction)) or isinstance(other, type(_RAT(0))):
            return GaussianRational._raw(self.re / other, self.im / other)
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction)) or isinstance(other, type(_RAT(0))):
            return GaussianRational(other).__truediv__(self)
        return NotImplemented

    def __neg__(self):
        return GaussianRational._raw(-self.re, -self.im)

    def __pos__(self):
        return self

    def __eq__(self, other):
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)) or isinstance(other, type(_RAT(0))):
            return self.im == 0 and self.re == other
        return NotImplemented

    def __hash__(self):
        if not self.im:
            return hash(self.re)  # equal to the matching int/Fraction hash
        h = (hash(self.re) + _HASH_IMAG * hash(self.im)) % _HASH_MOD
        return -2 if h == -1 else h

    def __repr__(self):
        if not self.im:
            return f"GaussianRational({str(self.re)!r})"
        return f"GaussianRational({str(self.re)!r}, {str(self.im)!r})"


Scalar = Union[GaussianRational, complex]


def is_exact(x) -> bool:
    return isinstance(x, GaussianRational)


def conjugate(x: Scalar) -> Scalar:
    return x.conjugate()


def real_part(x: Scalar):
    return x.re if isinstance(x, GaussianRational) else x.real


def imag_part(x: Scalar):
    return x.im if isinstance(x, GaussianRational) else x.imag


def magnitude(x: Scalar):
    """Size of a scalar for residual reporting.

    Float mode uses the modulus.  Exact mode uses |re| + |im|, which is
    rational and vanishes exactly when the scalar does, which is all the
    exact zero tests need.
    """
    if isinstance(x, GaussianRational):
        return abs(x.re) + abs(x.im)
    return abs(x)


def to_complex(x: Scalar) -> complex:
    if isinstance(x, GaussianRational):
        return x.to_complex()
    return complex(x)


def _zero(mode: str) -> Scalar:
    return GaussianRational() if mode == "exact" else 0j


def _one(mode: str) -> Scalar:
    return GaussianRational(1) if mode == "exact" else 1 + 0j


def _i_unit(mode: str) -> Scalar:
    return GaussianRational(0, 1) if mode == "exact" else 1j


class Matrix4:
    """Immutable 4x4 matrix over either scalar mode."""

    __slots__ = ("rows",)

    def __init__(self, rows: Iterable[Iterable[Scalar]]):
        rows = tuple(tuple(r) for r in rows)
        if len(rows) != 4 or any(len(r) != 4 for r in rows):
            raise ValueError("Matrix4 needs 4 rows of 4 entries")
        self.rows = rows

    # -- constructors -------------------------------------------------
    @classmethod
    def zeros(cls, mode="exact"):
        z = _zero(mode)
        return cls([[z] * 4 for _ in range(4)])

    @classmethod
    def identity(cls, mode="exact"):
        z, o = _zero(mode), _one(mode)
        return cls([[o if i == j else z for j in range(4)] for i in range(4)])

    @classmethod
    def diagonal(cls, values: Sequence[Scalar], mode=None):
        values = list(values)
        if mode is None:
            mode = "exact" if any(is_exact(v) for v in values) else "float"
        z = _zero(mode)
        return cls([[values[i] if i == j else z for j in range(4)] for i in range(4)])

    @classmethod
    def from_blocks(cls, tl, tr, bl, br):
        """Assemble from four 2x2 blocks (nested sequences of scalars)."""
        blocks = [tuple(tuple(r) for r in b) for b in (tl, tr, bl, br)]
        rows = []
        for i in range(2):
            rows.append(tuple(blocks[0][i]) + tuple(blocks[1][i]))
        for i in range(2):
            rows.append(tuple(blocks[2][i]) + tuple(blocks[3][i]))
        return cls(rows)

    @classmethod
    def from_numpy(cls, arr) -> "Matrix4":
        arr = np.asarray(arr, dtype=complex)
        if arr.shape != (4, 4):
            raise ValueError("expected a 4x4 array")
        return cls([[complex(arr[i, j]) for j in range(4)] for i in range(4)])

    # -- structure ----------------------------------------------------
    @property
    def mode(self) -> str:
        return "exact" if is_exact(self.rows[0][0]) else "float"

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        if not isinstance(other, Matrix4):
            return NotImplemented
        return self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __repr__(self):
        return f"Matrix4({[[str(e) for e in r] for r in self.rows]})"

    # -- arithmetic ---------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, Matrix4):
            return NotImplemented
        return Matrix4(
            [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.rows, other.rows)]
        )

    def __sub__(self, other):
        if not isinstance(other, Matrix4):
            return NotImplemented
        return Matrix4(
            [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(self.rows, other.rows)]
        )

    def __neg__(self):
        return Matrix4([[-a for a in r] for r in self.rows])

    def __mul__(self, scalar):
        if isinstance(scalar, Matrix4):
            raise TypeError("use @ for matrix products")
        return Matrix4([[a * scalar for a in r] for r in self.rows])

    __rmul__ = __mul__

    def __matmul__(self, other):
        if not isinstance(other, Matrix4):
            return NotImplemented
        cols = tuple(zip(*other.rows))
        return Matrix4(
            [[_dot(row, col) for col in cols] for row in self.rows]
        )

    def apply(self, vec: Sequence[Scalar]) -> tuple:
        """Matrix-vector product on a length-4 column."""
        return tuple(_dot(row, vec) for row in self.rows)

    def transpose(self):
        return Matrix4(tuple(zip(*self.rows)))

    def conj(self):
        return Matrix4([[e.conjugate() for e in r] for r in self.rows])

    def dagger(self):
        return Matrix4([[e.conjugate() for e in col] for col in zip(*self.rows)])

    def trace(self):
        r = self.rows
        return r[0][0] + r[1][1] + r[2][2] + r[3][3]

    def max_abs(self):
        """Largest entry magnitude (see `magnitude` for the exact-mode norm)."""
        return max(magnitude(e) for r in self.rows for e in r)

    # -- elimination-based pieces --------------------------------------
    def det(self) -> Scalar:
        a = [list(r) for r in self.rows]
        exact = self.mode == "exact"
        det = _one(self.mode)
        for col in range(4):
            piv = _pick_pivot(a, col, exact)
            if piv is None:
                return _zero(self.mode)
            if piv != col:
                a[piv], a[col] = a[col], a[piv]
                det = -det
            det = det * a[col][col]
            inv_p = _one(self.mode) / a[col][col]
            for r in range(col + 1, 4):
                f = a[r][col] * inv_p
                if _is_scalar_zero(f):
                    continue
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
        return det

    def inv(self) -> "Matrix4":
        mode = self.mode
        exact = mode == "exact"
        a = [list(r) + list(ir) for r, ir in zip(self.rows, Matrix4.identity(mode).rows)]
        for col in range(4):
            piv = _pick_pivot(a, col, exact)
            if piv is None:
                raise SingularMatrix("matrix is not invertible")
            if piv != col:
                a[piv], a[col] = a[col], a[piv]
            inv_p = _one(mode) / a[col][col]
            a[col] = [x * inv_p for x in a[col]]
            for r in range(4):
                if r == col:
                    continue
                f = a[r][col]
                if _is_scalar_zero(f):
                    continue
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
        return Matrix4([row[4:] for row in a])

    # -- conversions ----------------------------------------------------
    def to_float(self) -> "Matrix4":
        if self.mode == "float":
            return self
        return Matrix4([[e.to_complex() for e in r] for r in self.rows])

    def to_numpy(self):
        return np.array([[to_complex(e) for e in r] for r in self.rows], dtype=complex)


def _dot(row, col):
    acc = row[0] * col[0]
    for a, b in zip(row[1:], col[1:]):
        acc = acc + a * b
    return acc


def _is_scalar_zero(x) -> bool:
    if isinstance(x, GaussianRational):
        return not x
    return x == 0


def _pick_pivot(a, col, exact):
    if exact:
        for r in range(col, 4):
            if a[r][col]:
                return r
        return None
    best, best_mag = None, 0.0
    for r in range(col, 4):
        m = abs(a[r][col])
        if m > best_mag:
            best, best_mag = r, m
    return best


# ---------------------------------------------------------------------------
# Gamma basis
# ---------------------------------------------------------------------------

ETA = (1, -1, -1, -1)
BIVECTOR_PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
SECTORS = ("scalar", "vector", "bivector", "axial", "pseudoscalar")


def levi_civita(mu: int, nu: int, alpha: int, beta: int) -> int:
    """Totally antisymmetric symbol with eps_{0123} = +1."""
    idx = (mu, nu, alpha, beta)
    if len(set(idx)) != 4:
        return 0
    sign = 1
    lst = list(idx)
    for i in range(3):
        for j in range(3 - i):
            if lst[j] > lst[j + 1]:
                lst[j], lst[j + 1] = lst[j + 1], lst[j]
                sign = -sign
    return sign


EPSILON = tuple(
    tuple(
        tuple(tuple(levi_civita(m, n, a, b) for b in range(4)) for a in range(4))
        for n in range(4)
    )
    for m in range(4)
)


@dataclass(frozen=True)
class BasisElement:
    """One member of the 16-dimensional gamma-matrix basis."""

    label: str
    sector: str
    slot: int
    matrix: Matrix4
    inverse: Matrix4
    entries: tuple  # nonzero (row, col, value) triples, for fast sandwiching


def _element(label, sector, slot, matrix):
    entries = tuple(
        (i, j, matrix.rows[i][j])
        for i in range(4)
        for j in range(4)
        if not _is_scalar_zero(matrix.rows[i][j])
    )
    return BasisElement(label, sector, slot, matrix, matrix.inv(), entries)


@dataclass(frozen=True)
class GammaBasis:
    """The frozen Weyl gamma matrices plus their 16-element multiplicative basis.

    `elements` is the raw basis {I, gamma^mu, gamma^mu gamma^nu (mu<nu),
    gamma^5 gamma^mu, gamma^5} used by `gamma_basis_expand`.  `kernels`
    carries the same span but with the phases used by the bilinear
    observables (i on the bivector and pseudoscalar slots, gamma^mu gamma^5
    on the axial slots) so that every kernel K satisfies "gamma^0 K is
    Hermitian" and the associated bilinear is real.
    """

    mode: str
    gammas: tuple
    gamma5: Matrix4
    identity: Matrix4
    elements: tuple
    kernels: tuple
    eta: tuple = ETA

    def element(self, label: str) -> BasisElement:
        for e in self.elements:
            if e.label == label:
                return e
        raise KeyError(label)


@lru_cache(maxsize=None)
def build_gamma_basis(mode: str = "exact") -> GammaBasis:
    """Construct the fixed Weyl-representation basis in the requested mode."""
    if mode not in ("exact", "float"):
        raise ValueError("mode must be 'exact' or 'float'")
    z, o, iu = _zero(mode), _one(mode), _i_unit(mode)

    def m(rows):
        return Matrix4(rows)

    g0 = m([[z, z, o, z], [z, z, z, o], [o, z, z, z], [z, o, z, z]])
    g1 = m([[z, z, z, o], [z, z, o, z], [z, -o, z, z], [-o, z, z, z]])
    g2 = m([[z, z, z, -iu], [z, z, iu, z], [z, iu, z, z], [-iu, z, z, z]])
    g3 = m([[z, z, o, z], [z, z, z, -o], [-o, z, z, z], [z, o, z, z]])
    ident = Matrix4.identity(mode)
    g5 = Matrix4.diagonal([-o, -o, o, o])

    gammas = (g0, g1, g2, g3)

    elements = [_element("I", "scalar", 0, ident)]
    kernels = [_element("I", "scalar", 0, ident)]
    for mu in range(4):
        elements.append(_element(f"g{mu}", "vector", mu, gammas[mu]))
        kernels.append(_element(f"g{mu}", "vector", mu, gammas[mu]))
    for slot, (mu, nu) in enumerate(BIVECTOR_PAIRS):
        prod = gammas[mu] @ gammas[nu]
        elements.append(_element(f"g{mu}g{nu}", "bivector", slot, prod))
        kernels.append(_element(f"i*g{mu}g{nu}", "bivector", slot, prod * iu))
    for mu in range(4):
        elements.append(_element(f"g5g{mu}", "axial", mu, g5 @ gammas[mu]))
        kernels.append(_element(f"g{mu}g5", "axial", mu, gammas[mu] @ g5))
    elements.append(_element("g5", "pseudoscalar", 0, g5))
    kernels.append(_element("i*g5", "pseudoscalar", 0, g5 * iu))

    return GammaBasis(
        mode=mode,
        gammas=gammas,
        gamma5=g5,
        identity=ident,
        elements=tuple(elements),
        kernels=tuple(kernels),
    )


def clifford_residual(basis: GammaBasis):
    """Max-norm violation of the anticommutation relations; exact zero in exact mode."""
    worst = magnitude(_zero(basis.mode))
    ident = basis.identity
    for mu in range(4):
        for nu in range(mu, 4):
            anti = basis.gammas[mu] @ basis.gammas[nu] + basis.gammas[nu] @ basis.gammas[mu]
            target = ident * (2 * ETA[mu]) if mu == nu else Matrix4.zeros(basis.mode)
            r = (anti - target).max_abs()
            if r > worst:
                worst = r
    return worst


def _trace_product(a: Matrix4, b: Matrix4) -> Scalar:
    """tr(a @ b) without forming the product."""
    acc = None
    ar, br = a.rows, b.rows
    for i in range(4):
        for k in range(4):
            t = ar[i][k] * br[k][i]
            acc = t if acc is None else acc + t
    return acc


def gamma_basis_expand(matrix: Matrix4, basis: GammaBasis | None = None) -> tuple:
    """Coefficients of `matrix` over the raw 16-element basis.

    Uses the trace pairing tr(G_a^{-1} M)/4, which is orthonormal on this
    basis.  The reconstruction sum(c_a * G_a) reproduces the input, exactly
    in exact mode.
    """
    if basis is None:
        basis = build_gamma_basis(matrix.mode)
    return tuple(_trace_product(e.inverse, matrix) / 4 for e in basis.elements)


def gamma_basis_reconstruct(coeffs: Sequence[Scalar], basis: GammaBasis | None = None) -> Matrix4:
    if basis is None:
        mode = "exact" if any(is_exact(c) for c in coeffs) else "float"
        basis = build_gamma_basis(mode)
    acc = Matrix4.zeros(basis.mode)
    for c, e in zip(coeffs, basis.elements):
        acc = acc + e.matrix * c
    return acc


def kernel_expand(matrix: Matrix4, basis: GammaBasis) -> tuple:
    """Coefficients of `matrix` over the observable kernels (same span)."""
    return tuple(_trace_product(k.inverse, matrix) / 4 for k in basis.kernels)
