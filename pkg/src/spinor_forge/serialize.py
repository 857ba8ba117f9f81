"""JSON encodings for spinors, matrices, observables, and candidates.

Complex entries are [re, im] pairs, row-major for matrices.  Float mode
writes plain numbers; exact mode writes rationals as "p/q" strings (or
"p" when the denominator is 1), which is also how parsing tells the two
modes apart when no mode is forced.
"""

from __future__ import annotations

from fractions import Fraction

from .algebra import GaussianRational, Matrix4, _rat, is_exact
from .bilinear import BilinearSet, Spinor, fpk_residuals


def _real_to_json(x):
    if isinstance(x, float):
        return x
    return str(x)


def _real_from_json(v, mode):
    if mode == "exact":
        if isinstance(v, str):
            return _rat(v)
        if isinstance(v, int):
            return _rat(v)
        if isinstance(v, float):
            return _rat(Fraction(repr(v)))  # decimal reading, e.g. 0.5 -> 1/2
        raise ValueError(f"cannot read exact rational from {v!r}")
    return float(v)


def scalar_to_json(x):
    if is_exact(x):
        return [str(x.re), str(x.im)]
    z = complex(x)
    return [z.real, z.imag]


def scalar_from_json(pair, mode):
    re, im = pair
    if mode == "exact":
        return GaussianRational(_real_from_json(re, "exact"), _real_from_json(im, "exact"))
    return complex(float(re), float(im))


def _detect_mode(pairs) -> str:
    for pair in pairs:
        for v in pair:
            if isinstance(v, str):
                return "exact"
            if isinstance(v, float):
                return "float"
    return "exact"


def spinor_to_json(psi: Spinor):
    return [scalar_to_json(c) for c in psi.components]


def spinor_from_json(data, mode: str | None = None) -> Spinor:
    if len(data) != 4:
        raise ValueError("spinor JSON must have 4 [re, im] pairs")
    if mode is None:
        mode = _detect_mode(data)
    return Spinor([scalar_from_json(pair, mode) for pair in data])


def matrix_to_json(m: Matrix4):
    return [[scalar_to_json(e) for e in row] for row in m.rows]


def matrix_from_json(data, mode: str | None = None) -> Matrix4:
    if len(data) != 4 or any(len(r) != 4 for r in data):
        raise ValueError("matrix JSON must be 4 rows of 4 [re, im] pairs")
    if mode is None:
        mode = _detect_mode(pair for row in data for pair in row)
    return Matrix4([[scalar_from_json(pair, mode) for pair in row] for row in data])


def bilinear_set_to_json(bset: BilinearSet, include_fpk: bool = True) -> dict:
    out = {
        "sigma": _real_to_json(bset.sigma),
        "omega": _real_to_json(bset.omega),
        "J": [_real_to_json(v) for v in bset.J],
        "K": [_real_to_json(v) for v in bset.K],
        "S": [[_real_to_json(v) for v in row] for row in bset.S],
    }
    if include_fpk:
        out["fpk_max_residual"] = _real_to_json(fpk_residuals(bset).max_abs)
    return out


def bilinear_set_from_json(data, mode: str | None = None) -> BilinearSet:
    if mode is None:
        flat = [data["sigma"], data["omega"], *data["J"], *data["K"]]
        flat += [v for row in data["S"] for v in row]
        mode = "exact" if any(isinstance(v, str) for v in flat) else "float"
    rd = lambda v: _real_from_json(v, mode)
    return BilinearSet(
        sigma=rd(data["sigma"]),
        omega=rd(data["omega"]),
        J=tuple(rd(v) for v in data["J"]),
        K=tuple(rd(v) for v in data["K"]),
        S=tuple(tuple(rd(v) for v in row) for row in data["S"]),
    )


def candidate_to_json(candidate) -> dict:
    out = {"matrix": matrix_to_json(candidate.matrix), "antilinear": candidate.antilinear}
    if candidate.label:
        out["label"] = candidate.label
    return out


def candidate_from_json(data, mode: str | None = None):
    from .symmetry import SymmetryCandidate

    return SymmetryCandidate(
        matrix=matrix_from_json(data["matrix"], mode),
        antilinear=bool(data.get("antilinear", False)),
        label=data.get("label"),
    )


def beta_map_to_json(bmap) -> dict:
    return {
        "beta_scalar": _real_to_json(bmap.beta_scalar),
        "beta_pseudo": _real_to_json(bmap.beta_pseudo),
        "L_J": [[_real_to_json(v) for v in row] for row in bmap.l_vector],
        "L_K": [[_real_to_json(v) for v in row] for row in bmap.l_axial],
        "L_S": [[_real_to_json(v) for v in row] for row in bmap.l_bivector],
        "strict": bmap.strict,
    }
